"""Two-stage channel estimation for RIS-aided mmWave MIMO links."""

from .chanmodel import ChannelParams, ChannelSet, SystemConfig, realize, sample_paths
from .sensing import add_noise, nmse, synthesize
from .sparsekit import C1, C2, GridSpec
from .training import build_training, validate_config
from .trice import ls_estimate, lskrf, run_joint_cs, run_ls, run_trice

__all__ = [
    "C1", "C2", "ChannelParams", "ChannelSet", "GridSpec", "SystemConfig",
    "add_noise", "build_training", "ls_estimate", "lskrf", "nmse", "realize",
    "run_joint_cs", "run_ls", "run_trice", "sample_paths", "synthesize", "validate_config",
]
