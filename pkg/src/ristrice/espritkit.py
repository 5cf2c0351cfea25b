"""DFT-beamspace ESPRIT.

Observations are taken through the first ``B`` rows of the unitary
``M``-point DFT matrix.  For a ULA response ``v(nu)`` the beam outputs
``c_p`` obey, for every pair of neighbouring beams,

    c_p - c_{p+1} = e^{j nu} (w^p c_p - w^{p+1} c_{p+1}),   w = e^{-j 2 pi / M},

so with ``G1 = D`` and ``G2 = D diag(w^p)`` (``D`` the first-difference
operator) the beamspace steering matrix satisfies ``G1 A = G2 A Phi``.  This
is the shift-invariance equation solved below by least squares.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .chanmodel import TWO_PI
from .numkit import lstsq

RANK_TOL = 1e-8
# Fixed complex weight mixing the two axis operators before the shared
# eigendecomposition; any value off the unit circle avoids systematic ties.
PAIRING_WEIGHT = 1.7 * np.exp(0.9j)


class SectorWarning(UserWarning):
    """An estimate fell outside the sector covered by the DFT beams."""


class SubspaceRankError(ValueError):
    pass


@dataclass(frozen=True)
class BeamspaceObs:
    data: np.ndarray  # beams x snapshots
    m: int
    b: int

    def __post_init__(self):
        if self.b > self.m:
            raise ValueError(f"{self.b} beams exceed {self.m} elements")
        if self.data.shape[0] != self.b:
            raise ValueError(f"data has {self.data.shape[0]} rows for {self.b} beams")


def selection_pair(m, b):
    """``(G1, G2)`` of shape ``(b-1) x b`` with ``G1 A = G2 A diag(e^{j nu})``."""
    d = np.eye(b - 1, b) - np.eye(b - 1, b, 1)
    w = np.exp(-2j * np.pi * np.arange(b) / m)
    return d.astype(complex), d * w


def _canonical(nu):
    return np.mod(nu, TWO_PI)


def _check_sector(freqs, m, b, what):
    hi = TWO_PI * (b - 1) / m
    margin = TWO_PI / m
    wrapped = np.where(freqs > TWO_PI - margin, freqs - TWO_PI, freqs)
    bad = (wrapped < -margin) | (wrapped > hi + margin)
    if np.any(bad):
        warnings.warn(f"{what}: estimate(s) {np.round(freqs[bad], 4)} lie outside the visible "
                      f"sector [0, {hi:.4f}); beamspace ESPRIT is not reliable there",
                      SectorWarning, stacklevel=3)


def signal_subspace(data, n):
    """The ``n`` dominant left singular vectors of ``data``."""
    data = np.asarray(data, dtype=complex)
    if data.ndim == 1:
        data = data[:, None]
    u, s, _ = np.linalg.svd(data, full_matrices=False)
    rank = int(np.sum(s > RANK_TOL * s[0])) if s.size and s[0] > 0 else 0
    if rank < n:
        raise SubspaceRankError(f"signal subspace has rank {rank} < {n}")
    return u[:, :n]


def esprit_1d(obs, n_sources):
    """Frequencies of ``n_sources`` ULA sources, sorted, in [0, 2 pi)."""
    if obs.b < n_sources + 1:
        raise ValueError(f"{obs.b} beams cannot resolve {n_sources} sources (need >= {n_sources + 1})")
    es = signal_subspace(obs.data, n_sources)
    g1, g2 = selection_pair(obs.m, obs.b)
    psi = lstsq(g2 @ es, g1 @ es)
    freqs = np.sort(_canonical(np.angle(np.linalg.eigvals(psi))))
    _check_sector(freqs, obs.m, obs.b, "esprit_1d")
    return freqs


def esprit_2d_stage1(y, cfg, l_t=None, l_r=None):
    """Paired ``(psi_t, psi_r)`` for all ``l_t * l_r`` cascaded paths.

    ``y`` is the ``(n_r k_t) x k_s`` training block whose columns live in the
    span of ``kron(F^T v(psi_t), W^T v(psi_r))``.  Shift-invariance
    operators are solved per axis; one eigendecomposition of their weighted
    sum diagonalizes both, which pairs the frequencies.  Rows of the result
    are sorted by ``psi_t`` then ``psi_r``.
    """
    l_t = cfg.l_t if l_t is None else l_t
    l_r = cfg.l_r if l_r is None else l_r
    n = l_t * l_r
    if cfg.n_r < 2 or cfg.k_t < 2:
        raise ValueError("two-axis beamspace ESPRIT needs at least two beams per axis")
    if (cfg.k_t - 1) * cfg.n_r < n or (cfg.n_r - 1) * cfg.k_t < n:
        raise ValueError(f"too few beams to resolve {n} paths")
    es = signal_subspace(y, n)

    g1_r, g2_r = selection_pair(cfg.m_r, cfg.n_r)
    g1_t, g2_t = selection_pair(cfg.m_t, cfg.k_t)
    eye_r = np.eye(cfg.n_r)
    eye_t = np.eye(cfg.k_t)
    psi_r_op = lstsq(np.kron(eye_t, g2_r) @ es, np.kron(eye_t, g1_r) @ es)
    psi_t_op = lstsq(np.kron(g2_t, eye_r) @ es, np.kron(g1_t, eye_r) @ es)

    _, vecs = np.linalg.eig(psi_t_op + PAIRING_WEIGHT * psi_r_op)
    inv = np.linalg.inv(vecs)
    psi_t = _canonical(np.angle(np.diag(inv @ psi_t_op @ vecs)))
    psi_r = _canonical(np.angle(np.diag(inv @ psi_r_op @ vecs)))
    _check_sector(psi_t, cfg.m_t, cfg.k_t, "stage-1 psi_t")
    _check_sector(psi_r, cfg.m_r, cfg.n_r, "stage-1 psi_r")
    # paths sharing a BS frequency come out equal only to rounding error
    order = np.lexsort((psi_r, np.round(psi_t, 9)))
    return np.column_stack([psi_t[order], psi_r[order]])


def esprit_2d_stage2(y_n, cfg):
    """``(mu_v, mu_h)`` of one path from its length-``k_s`` projected vector.

    With ``Q = kron(Q_v, Q_h)`` the vector reshapes (row-major) to the
    rank-one ``k_sv x k_sh`` matrix ``alpha a_v a_h^T``; its dominant singular
    vectors feed two single-source 1D solves.
    """
    y_n = np.asarray(y_n, dtype=complex).ravel()
    if y_n.size != cfg.k_s:
        raise ValueError(f"expected length {cfg.k_s}, got {y_n.size}")
    if cfg.k_sv < 2 or cfg.k_sh < 2:
        raise ValueError("stage-2 ESPRIT needs at least two beams in each RIS dimension")
    if not np.any(y_n):
        raise SubspaceRankError("stage-2 observation is identically zero")
    mat = y_n.reshape(cfg.k_sv, cfg.k_sh)
    u, _, vh = np.linalg.svd(mat)
    mu_v = esprit_1d(BeamspaceObs(u[:, :1], cfg.m_sv, cfg.k_sv), 1)[0]
    mu_h = esprit_1d(BeamspaceObs(vh[:1].T, cfg.m_sh, cfg.k_sh), 1)[0]
    return float(mu_v), float(mu_h)
