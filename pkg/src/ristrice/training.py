"""DFT-based training matrices and identifiability checks."""

from dataclasses import dataclass, field

import numpy as np

METHODS = ("trice-bes", "trice-cs", "joint-cs")


@dataclass(frozen=True)
class TrainingSet:
    w: np.ndarray  # m_r x n_r combiner
    f: np.ndarray  # m_t x k_t BS beams (pilots folded in, p_t = 1)
    q_v: np.ndarray  # m_sv x k_sv
    q_h: np.ndarray  # m_sh x k_sh
    q: np.ndarray  # m_s x k_s, kron(q_v, q_h)


def dft_matrix(m):
    """Unitary DFT matrix, entry (p, q) = exp(-j 2 pi p q / m) / sqrt(m)."""
    if m < 1:
        raise ValueError("dft_matrix needs m >= 1")
    idx = np.arange(m)
    return np.exp(-2j * np.pi * np.outer(idx, idx) / m) / np.sqrt(m)


def first_rows(m, k):
    """The first ``k`` rows of the ``m``-point unitary DFT matrix, transposed."""
    return dft_matrix(m)[:k].T


def build_training(cfg):
    q_v = first_rows(cfg.m_sv, cfg.k_sv)
    q_h = first_rows(cfg.m_sh, cfg.k_sh)
    return TrainingSet(
        w=first_rows(cfg.m_r, cfg.n_r),
        f=first_rows(cfg.m_t, cfg.k_t),
        q_v=q_v,
        q_h=q_h,
        q=np.kron(q_v, q_h),
    )


@dataclass
class Condition:
    name: str
    passed: bool
    hard: bool = True
    detail: str = ""


@dataclass
class ValidationReport:
    method: str
    conditions: list = field(default_factory=list)

    @property
    def ok(self):
        """True when every hard condition passes (warnings are ignored)."""
        return all(c.passed for c in self.conditions if c.hard)

    @property
    def failures(self):
        return [c.name for c in self.conditions if c.hard and not c.passed]

    @property
    def warnings(self):
        return [c.name for c in self.conditions if not c.hard and not c.passed]

    def lines(self):
        out = []
        for c in self.conditions:
            tag = "PASS" if c.passed else ("FAIL" if c.hard else "WARN")
            out.append(f"{tag:4}  {c.name}" + (f"  ({c.detail})" if c.detail else ""))
        return out


def validate_config(cfg, method, grids=None):
    """Check the training-overhead conditions for ``method``.

    For "trice-bes" the conditions are hard requirements of beamspace
    ESPRIT.  ``L >= 4`` is reported on its own line as advisory.  For the CS
    methods the order-of-magnitude overhead bounds are only warnings;
    ``grids`` is a :class:`~ristrice.sparsekit.GridSpec` (defaults to C.1).
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    L = cfg.n_paths
    report = ValidationReport(method)
    add = report.conditions.append

    if method == "trice-bes":
        add(Condition("K_S >= L", cfg.k_s >= L, detail=f"K_S={cfg.k_s}, L={L}"))
        add(Condition("L >= 4", L >= 4, hard=False, detail=f"L={L}"))
        add(Condition("N_R >= L_R+1", cfg.n_r >= cfg.l_r + 1, detail=f"N_R={cfg.n_r}, L_R={cfg.l_r}"))
        add(Condition("K_T >= L_T+1", cfg.k_t >= cfg.l_t + 1, detail=f"K_T={cfg.k_t}, L_T={cfg.l_t}"))
        add(Condition("(K_T-1)N_R >= L", (cfg.k_t - 1) * cfg.n_r >= L,
                      detail=f"{(cfg.k_t - 1) * cfg.n_r} vs {L}"))
        add(Condition("(N_R-1)K_T >= L", (cfg.n_r - 1) * cfg.k_t >= L,
                      detail=f"{(cfg.n_r - 1) * cfg.k_t} vs {L}"))
        add(Condition("K_S_v >= 2 and K_S_h >= 2", cfg.k_sv >= 2 and cfg.k_sh >= 2,
                      detail=f"{cfg.k_sv}x{cfg.k_sh}"))
        return report

    from .sparsekit import GridSpec

    grids = grids or GridSpec()
    n_t, n_r, n_v, n_h = grids.counts(cfg)
    add(Condition("N_R K_T >= L", cfg.n_r * cfg.k_t >= L, detail=f"{cfg.n_r * cfg.k_t} vs {L}"))
    if method == "trice-cs":
        need1 = L * np.log(max(n_t * n_r / L, 1.0))
        add(Condition("N_R K_T ~ L log(Lbar_R Lbar_T / L)", cfg.n_r * cfg.k_t >= need1, hard=False,
                      detail=f"{cfg.n_r * cfg.k_t} vs {need1:.1f}"))
        need2 = np.log(n_v * n_h)
        add(Condition("K_S ~ log(Lbar_S_v Lbar_S_h)", cfg.k_s >= need2, hard=False,
                      detail=f"{cfg.k_s} vs {need2:.1f}"))
    else:
        need = L * np.log(max(n_t * n_r * n_v * n_h / L, 1.0))
        rows = cfg.n_r * cfg.k_t * cfg.k_s
        add(Condition("N_R K_T K_S ~ L log(Lbar_S_v Lbar_S_h Lbar_R Lbar_T / L)", rows >= need,
                      hard=False, detail=f"{rows} vs {need:.1f}"))
    return report
