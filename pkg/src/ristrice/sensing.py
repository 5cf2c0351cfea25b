"""Received training block, noise calibration and error metrics."""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class MeasurementBlock:
    y: np.ndarray  # (n_r k_t) x k_s
    y0: np.ndarray
    sigma2: float
    snr_db: float


def synthesize(cfg, channels, train):
    """Noiseless block ``Y0 = (F^T kron W^T) H Q``."""
    h = channels.h if hasattr(channels, "h") else np.asarray(channels)
    if h.shape != (cfg.m_r * cfg.m_t, cfg.m_s):
        raise ValueError(f"cascaded channel has shape {h.shape}, expected "
                         f"{(cfg.m_r * cfg.m_t, cfg.m_s)}")
    if train.q.shape != (cfg.m_s, cfg.k_s):
        raise ValueError(f"RIS training has shape {train.q.shape}, expected {(cfg.m_s, cfg.k_s)}")
    return np.kron(train.f.T, train.w.T) @ h @ train.q


def add_noise(y0, snr_db, rng):
    """Add CN(0, sigma2) noise so that ||Y0||^2 / E||Z||^2 equals the SNR.

    ``snr_db = inf`` returns the block untouched with ``sigma2 = 0``.
    """
    y0 = np.asarray(y0, dtype=complex)
    if np.isposinf(snr_db):
        return MeasurementBlock(y0.copy(), y0, 0.0, snr_db)
    power = float(np.vdot(y0, y0).real)
    if power == 0.0:
        raise ValueError("cannot calibrate a finite SNR against an all-zero block")
    sigma2 = power / (10.0 ** (snr_db / 10.0) * y0.size)
    z = np.sqrt(sigma2 / 2.0) * (rng.standard_normal(y0.shape) + 1j * rng.standard_normal(y0.shape))
    return MeasurementBlock(y0 + z, y0, sigma2, snr_db)


def nmse(h_true, h_hat):
    h_true = np.asarray(h_true)
    h_hat = np.asarray(h_hat)
    if h_true.shape != h_hat.shape:
        raise ValueError(f"shape mismatch {h_true.shape} vs {h_hat.shape}")
    ref = np.linalg.norm(h_true) ** 2
    if ref == 0:
        raise ValueError("nmse undefined for an all-zero reference channel")
    return float(np.linalg.norm(h_true - h_hat) ** 2 / ref)
