"""Geometric channel model for the BS -> RIS -> MS link.

The BS and MS carry ULAs, the RIS is a ``m_sv x m_sh`` planar array.  Every
frequency below is a spatial frequency in radians per element.
"""

from dataclasses import dataclass

import numpy as np

from .numkit import khatri_rao

TWO_PI = 2.0 * np.pi
MIN_SEPARATION = 1e-6


@dataclass(frozen=True)
class SystemConfig:
    """Array sizes, training budget and path counts.

    ``m_s = m_sv * m_sh`` RIS elements are trained with ``k_s = k_sv * k_sh``
    phase configurations; the BS sends ``k_t`` training beams and the MS
    combines with ``n_r`` RF chains.
    """

    m_t: int = 16
    m_r: int = 8
    m_sv: int = 8
    m_sh: int = 8
    n_r: int = 4
    k_t: int = 4
    k_sv: int = 4
    k_sh: int = 4
    l_t: int = 2
    l_r: int = 2

    def __post_init__(self):
        for name, value in vars(self).items():
            if not isinstance(value, (int, np.integer)) or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")
        for small, big in (("n_r", "m_r"), ("k_t", "m_t"), ("k_sv", "m_sv"), ("k_sh", "m_sh")):
            if getattr(self, small) > getattr(self, big):
                raise ValueError(f"{small}={getattr(self, small)} exceeds {big}={getattr(self, big)}")

    @property
    def m_s(self):
        return self.m_sv * self.m_sh

    @property
    def k_s(self):
        return self.k_sv * self.k_sh

    @property
    def n_paths(self):
        return self.l_t * self.l_r


@dataclass(frozen=True)
class ChannelParams:
    psi_t: np.ndarray
    psi_r: np.ndarray
    mu_v_t: np.ndarray
    mu_h_t: np.ndarray
    mu_v_r: np.ndarray
    mu_h_r: np.ndarray
    alpha_t: np.ndarray
    alpha_r: np.ndarray


@dataclass(frozen=True)
class ChannelSet:
    """Realized channels plus the per-path parameters of the cascade.

    Cascaded path ``n = l * l_r + k`` (0-based) combines BS path ``l`` with
    MS path ``k``.
    """

    h_t: np.ndarray  # m_s x m_t
    h_r: np.ndarray  # m_r x m_s
    h: np.ndarray  # (m_r m_t) x m_s
    psi_t_eff: np.ndarray
    psi_r_eff: np.ndarray
    mu_v_eff: np.ndarray
    mu_h_eff: np.ndarray
    alpha_eff: np.ndarray


def steering_1d(nu, m):
    """ULA response ``[1, e^{j nu}, ..., e^{j (m-1) nu}]``."""
    if m < 1:
        raise ValueError("steering_1d needs m >= 1")
    return np.exp(1j * nu * np.arange(m))


def steering_2d(mu_v, mu_h, m_v, m_h):
    """URA response; entry ``p * m_h + q`` is ``e^{j (p mu_v + q mu_h)}``."""
    return np.kron(steering_1d(mu_v, m_v), steering_1d(mu_h, m_h))


def steering_matrix(freqs, m):
    """Columns are ``steering_1d(f, m)`` for each ``f`` in ``freqs``."""
    freqs = np.atleast_1d(np.asarray(freqs, dtype=float))
    return np.exp(1j * np.outer(np.arange(m), freqs))


def freq_from_angle(angle_deg, kind="azimuth-1d", aux_angle_deg=None, d_over_lambda=0.5):
    """Map a physical angle to a spatial frequency.

    kind="azimuth-1d": 2 pi (d/lambda) cos(phi), phi in [-180, 180].
    kind="ris-h": 2 pi (d/lambda) cos(theta_h), theta_h in [-180, 180].
    kind="ris-v": 2 pi (d/lambda) sin(theta_h) cos(theta_v) with
    ``angle_deg = theta_v`` in [-90, 90] and ``aux_angle_deg = theta_h``.
    """
    scale = TWO_PI * d_over_lambda
    if kind in ("azimuth-1d", "ris-h"):
        if not -180.0 <= angle_deg <= 180.0:
            raise ValueError(f"angle {angle_deg} outside [-180, 180]")
        return scale * np.cos(np.deg2rad(angle_deg))
    if kind == "ris-v":
        if not -90.0 <= angle_deg <= 90.0:
            raise ValueError(f"elevation {angle_deg} outside [-90, 90]")
        if aux_angle_deg is None or not -180.0 <= aux_angle_deg <= 180.0:
            raise ValueError("ris-v needs an azimuth aux_angle_deg in [-180, 180]")
        return scale * np.sin(np.deg2rad(aux_angle_deg)) * np.cos(np.deg2rad(angle_deg))
    raise ValueError(f"unknown frequency kind {kind!r}")


def visible_sector(k, m):
    """Upper end of the frequency sector ``[0, 2 pi (k-1)/m)`` seen by ``k`` DFT beams."""
    if k < 2:
        raise ValueError(f"a single beam (k={k}) leaves an empty visible sector")
    return TWO_PI * (k - 1) / m


def _separated(freqs):
    if freqs.size < 2:
        return True
    d = np.abs(freqs[:, None] - freqs[None, :]) % TWO_PI
    d = np.minimum(d, TWO_PI - d)
    return np.all(d[np.triu_indices(freqs.size, 1)] >= MIN_SEPARATION)


def _complex_normal(rng, n):
    return (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2.0)


def sample_paths(cfg, rng, full_sector=False):
    """Draw path frequencies and gains.

    BS and MS frequencies are uniform over the sector covered by the first
    ``k_t`` (``n_r``) DFT beams.  Each RIS frequency of each link is uniform
    over half of the RIS sector so that the effective (summed) frequencies
    stay inside it.  Gains are CN(0, 1) per link.  With ``full_sector`` every
    frequency is uniform on [0, 2 pi) instead.

    Uniform variates are drawn before scaling so that configs differing only
    in their sectors see the same underlying draws for a given ``rng`` state.
    """
    if full_sector:
        hi_r = hi_t = hi_v = hi_h = TWO_PI
    else:
        hi_r = visible_sector(cfg.n_r, cfg.m_r)
        hi_t = visible_sector(cfg.k_t, cfg.m_t)
        hi_v = visible_sector(cfg.k_sv, cfg.m_sv) / 2
        hi_h = visible_sector(cfg.k_sh, cfg.m_sh) / 2

    while True:
        psi_r = hi_r * rng.random(cfg.l_r)
        if _separated(psi_r):
            break
    while True:
        psi_t = hi_t * rng.random(cfg.l_t)
        if _separated(psi_t):
            break
    mu_h_t = hi_h * rng.random(cfg.l_t)
    mu_v_t = hi_v * rng.random(cfg.l_t)
    mu_h_r = hi_h * rng.random(cfg.l_r)
    mu_v_r = hi_v * rng.random(cfg.l_r)
    alpha_t = _complex_normal(rng, cfg.l_t)
    alpha_r = _complex_normal(rng, cfg.l_r)
    return ChannelParams(psi_t, psi_r, mu_v_t, mu_h_t, mu_v_r, mu_h_r, alpha_t, alpha_r)


def snap_to_grid(params, cfg, steps):
    """Round every frequency down onto a grid.

    ``steps`` holds the grid spacings ``(psi_t, psi_r, mu_v, mu_h)``.
    Per-link RIS frequencies are snapped individually, so their sums land on
    the same grid and stay below the sector end.  Returns ``None`` when
    snapping merges two paths.
    """
    step_t, step_r, step_v, step_h = steps

    def snap(f, step):
        return np.floor(np.asarray(f) / step + 1e-9) * step

    psi_t = snap(params.psi_t, step_t)
    psi_r = snap(params.psi_r, step_r)
    if not (_separated(psi_t) and _separated(psi_r)):
        return None
    return ChannelParams(
        psi_t, psi_r,
        snap(params.mu_v_t, step_v), snap(params.mu_h_t, step_h),
        snap(params.mu_v_r, step_v), snap(params.mu_h_r, step_h),
        params.alpha_t, params.alpha_r,
    )


def sample_on_grid(cfg, rng, steps, min_cells=1):
    """``sample_paths`` snapped to a grid, redrawn until BS and MS frequencies
    are at least ``min_cells`` grid steps apart."""
    while True:
        snapped = snap_to_grid(sample_paths(cfg, rng), cfg, steps)
        if snapped is None:
            continue
        if all(_min_gap(f) >= (min_cells - 0.5) * st
               for f, st in ((snapped.psi_t, steps[0]), (snapped.psi_r, steps[1]))):
            return snapped


def _min_gap(freqs):
    if freqs.size < 2:
        return np.inf
    d = np.abs(freqs[:, None] - freqs[None, :])
    return d[np.triu_indices(freqs.size, 1)].min()


def effective_paths(cfg, params):
    """Per-cascaded-path ``(psi_t, psi_r, mu_v, mu_h, alpha)`` arrays of length L."""
    l_idx = np.repeat(np.arange(cfg.l_t), cfg.l_r)
    k_idx = np.tile(np.arange(cfg.l_r), cfg.l_t)
    return (
        params.psi_t[l_idx],
        params.psi_r[k_idx],
        params.mu_v_t[l_idx] + params.mu_v_r[k_idx],
        params.mu_h_t[l_idx] + params.mu_h_r[k_idx],
        params.alpha_t[l_idx] * params.alpha_r[k_idx],
    )


def realize(cfg, params):
    """Build H_T, H_R and the cascaded H = (A_T kron A_R) G B."""
    a_t = steering_matrix(params.psi_t, cfg.m_t)
    a_r = steering_matrix(params.psi_r, cfg.m_r)
    b_t = khatri_rao(steering_matrix(params.mu_v_t, cfg.m_sv), steering_matrix(params.mu_h_t, cfg.m_sh))
    b_r = khatri_rao(steering_matrix(params.mu_v_r, cfg.m_sv), steering_matrix(params.mu_h_r, cfg.m_sh))

    h_t = (b_t * params.alpha_t) @ a_t.T
    h_r = (a_r * params.alpha_r) @ b_r.T

    g = np.kron(params.alpha_t, params.alpha_r)
    b = khatri_rao(b_t.T, b_r.T)  # L x m_s
    h = (np.kron(a_t, a_r) * g) @ b

    psi_t_eff, psi_r_eff, mu_v, mu_h, alpha = effective_paths(cfg, params)
    return ChannelSet(h_t, h_r, h, psi_t_eff, psi_r_eff, mu_v, mu_h, alpha)
