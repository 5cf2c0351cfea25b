"""Two-stage cascaded-channel estimation and the LS / Joint-CS baselines."""

import time
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import espritkit
from .chanmodel import TWO_PI, steering_matrix
from .numkit import khatri_rao, numerical_rank, pinv, rank1_approx
from .sensing import nmse as nmse_of
from .sparsekit import C1, dict_joint4d, dict_stage1, dict_stage2, omp, somp
from .training import validate_config

LS_MAX_ENTRIES = 2 ** 24


class ConfigError(ValueError):
    pass


class StageError(RuntimeError):
    def __init__(self, stage, cause):
        super().__init__(f"{stage}: {cause}")
        self.stage = stage


@dataclass
class Stage1Result:
    """Per-path BS/MS frequencies and the matching columns of A_hat.

    Path ``n`` uses ``psi_t[n]`` and ``psi_r[n]``; for an exact Cartesian
    estimate the order is ``n = l * l_r + k``.
    """

    psi_t: np.ndarray
    psi_r: np.ndarray
    a_hat: np.ndarray


@dataclass
class Stage2Result:
    mu_v: np.ndarray
    mu_h: np.ndarray
    alpha: np.ndarray


@dataclass
class EstimateReport:
    method: str
    h_hat: np.ndarray
    h_t_hat: np.ndarray = None
    h_r_hat: np.ndarray = None
    nmse: float = None
    paths: dict = field(default_factory=dict)
    runtime_s: float = 0.0


def _block(y):
    return y.y if hasattr(y, "y") else np.asarray(y, dtype=complex)


def measurement_steering(train, psi_t, psi_r):
    """Columns ``kron(F^T v(psi_t[n]), W^T v(psi_r[n]))``."""
    at = train.f.T @ steering_matrix(psi_t, train.f.shape[0])
    ar = train.w.T @ steering_matrix(psi_r, train.w.shape[0])
    return khatri_rao(at, ar)


def ls_estimate(y, train, cfg, explicit=False, max_entries=LS_MAX_ENTRIES):
    """Minimum-norm LS estimate ``pinv(Q^T kron F^T kron W^T) vec(Y)``.

    The default path uses ``pinv(A kron B) = pinv(A) kron pinv(B)`` and
    never forms the full sensing operator; ``explicit=True`` builds it (for
    cross-checks) and refuses operators larger than ``max_entries``.
    """
    y = _block(y)
    rows = cfg.n_r * cfg.k_t * cfg.k_s
    cols = cfg.m_r * cfg.m_t * cfg.m_s
    if explicit:
        if rows * cols > max_entries:
            raise MemoryError(f"LS operator would be {rows}x{cols}; cap is {max_entries} entries")
        ups = np.kron(train.q.T, np.kron(train.f.T, train.w.T))
        h = pinv(ups) @ y.reshape(-1, order="F")
        return h.reshape(cfg.m_r * cfg.m_t, cfg.m_s, order="F")
    left = pinv(np.kron(train.f.T, train.w.T))
    right = pinv(train.q.T)
    # vec(L Y R^T) = (R kron L) vec(Y)
    return left @ y @ right.T


def stage1(y, train, cfg, method="bes", grids=C1):
    y = _block(y)
    if method == "bes":
        pairs = espritkit.esprit_2d_stage1(y, cfg)
        psi_t, psi_r = pairs[:, 0], pairs[:, 1]
    elif method == "cs":
        g_t, g_r, _, _ = grids.grids(cfg)
        fit = somp(dict_stage1(train.f, train.w, g_t, g_r), y, cfg.n_paths)
        psi_t, psi_r = fit.labels[:, 0], fit.labels[:, 1]
    else:
        raise ValueError(f"unknown stage-1 method {method!r}")
    return Stage1Result(psi_t, psi_r, measurement_steering(train, psi_t, psi_r))


def project(y, a_hat, rank_tol=1e-8):
    """``pinv(A_hat) Y``: one row per path, one column per RIS configuration."""
    y = _block(y)
    n = a_hat.shape[1]
    if numerical_rank(a_hat, rank_tol) < n:
        raise np.linalg.LinAlgError(f"A_hat has numerical rank below its {n} columns")
    return pinv(a_hat) @ y


def ris_atom(mu_v, mu_h, q_v, q_h):
    return np.kron(q_v.T @ steering_matrix(mu_v, q_v.shape[0])[:, 0],
                   q_h.T @ steering_matrix(mu_h, q_h.shape[0])[:, 0])


def estimate_gain(y_n, mu_v, mu_h, q_v, q_h):
    """Scalar LS fit of ``y_n`` on the RIS atom at ``(mu_v, mu_h)``."""
    atom = ris_atom(mu_v, mu_h, q_v, q_h)
    energy = np.vdot(atom, atom).real
    if energy == 0:
        raise ValueError("RIS atom vanishes; gain is not identifiable")
    return complex(np.vdot(atom, y_n) / energy)


def stage2(ybar, train, cfg, method="bes", grids=C1):
    """Per-path effective RIS frequencies and gains.

    Row ``n`` of ``ybar`` is processed on its own, so output ``n`` stays
    paired with stage-1 path ``n``.
    """
    n_paths = ybar.shape[0]
    mu_v = np.empty(n_paths)
    mu_h = np.empty(n_paths)
    alpha = np.empty(n_paths, dtype=complex)
    phi = None
    if method == "cs":
        _, _, g_v, g_h = grids.grids(cfg)
        phi = dict_stage2(train.q_v, train.q_h, g_v, g_h)
    elif method != "bes":
        raise ValueError(f"unknown stage-2 method {method!r}")
    for n in range(n_paths):
        y_n = ybar[n]
        if not np.any(y_n):
            raise ValueError(f"projected observation of path {n} is zero")
        if phi is None:
            mu_v[n], mu_h[n] = espritkit.esprit_2d_stage2(y_n, cfg)
        else:
            mu_v[n], mu_h[n] = omp(phi, y_n, 1).labels[0]
        alpha[n] = estimate_gain(y_n, mu_v[n], mu_h[n], train.q_v, train.q_h)
    return Stage2Result(mu_v, mu_h, alpha)


def assemble_channel(cfg, psi_t, psi_r, mu_v, mu_h, alpha):
    """``sum_n alpha_n kron(v(psi_t_n), v(psi_r_n)) (v(mu_v_n) kron v(mu_h_n))^T``."""
    a = khatri_rao(steering_matrix(psi_t, cfg.m_t), steering_matrix(psi_r, cfg.m_r))
    b_t = khatri_rao(steering_matrix(mu_v, cfg.m_sv), steering_matrix(mu_h, cfg.m_sh))
    return (a * np.asarray(alpha)) @ b_t.T


def reconstruct(s1, s2, cfg):
    if len(s1.psi_t) != len(s2.alpha):
        raise ValueError("stage results disagree on the number of paths")
    return assemble_channel(cfg, s1.psi_t, s1.psi_r, s2.mu_v, s2.mu_h, s2.alpha)


def lskrf(h_hat, cfg):
    """Split the cascade into ``(H_T, H_R)`` column by column.

    Column ``m`` of H reshapes (column-major) to ``h_R h_T^T``.  The dominant
    singular pair gives both factors; the H_T row is unit norm with a real
    non-negative first entry and the H_R column carries the scale.
    """
    h_hat = np.asarray(h_hat)
    if h_hat.shape != (cfg.m_r * cfg.m_t, cfg.m_s):
        raise ValueError(f"cascade has shape {h_hat.shape}")
    h_t = np.zeros((cfg.m_s, cfg.m_t), dtype=complex)
    h_r = np.zeros((cfg.m_r, cfg.m_s), dtype=complex)
    for m in range(cfg.m_s):
        u, s, v = rank1_approx(h_hat[:, m].reshape(cfg.m_r, cfg.m_t, order="F"))
        t_vec = v.conj()
        if t_vec[0] != 0:
            phase = t_vec[0] / abs(t_vec[0])
            t_vec = t_vec / phase
            u = u * phase
        h_t[m] = t_vec
        h_r[:, m] = s * u
    return h_t, h_r


def _check_config(cfg, method, grids):
    report = validate_config(cfg, method, grids)
    if not report.ok:
        raise ConfigError(f"{method} requirements violated: {', '.join(report.failures)}")
    cs_warnings = report.warnings if method != "trice-bes" else []
    for name in cs_warnings:
        warnings.warn(f"{method}: overhead bound not met ({name})", stacklevel=3)


def run_trice(y, train, cfg, method="bes", grids=C1, h_true=None, factor=True):
    """Stage 1, projection, per-path stage 2, reconstruction and LSKRF."""
    _check_config(cfg, f"trice-{method}", grids)
    y = _block(y)
    start = time.perf_counter()
    try:
        s1 = stage1(y, train, cfg, method, grids)
    except Exception as err:
        raise StageError("stage 1", err) from err
    try:
        ybar = project(y, s1.a_hat)
    except Exception as err:
        raise StageError("projection", err) from err
    try:
        s2 = stage2(ybar, train, cfg, method, grids)
    except Exception as err:
        raise StageError("stage 2", err) from err
    h_hat = reconstruct(s1, s2, cfg)
    h_t_hat = h_r_hat = None
    if factor:
        h_t_hat, h_r_hat = lskrf(h_hat, cfg)
    report = EstimateReport(
        method=f"trice-{method}", h_hat=h_hat, h_t_hat=h_t_hat, h_r_hat=h_r_hat,
        paths=dict(psi_t=s1.psi_t, psi_r=s1.psi_r, mu_v=s2.mu_v, mu_h=s2.mu_h, alpha=s2.alpha),
        runtime_s=time.perf_counter() - start,
    )
    if h_true is not None:
        report.nmse = nmse_of(h_true, h_hat)
    return report


def run_joint_cs(y, train, cfg, grids=C1, h_true=None, **dict_kwargs):
    """OMP over the 4D dictionary against ``vec(Y)``; gains from the refit."""
    _check_config(cfg, "joint-cs", grids)
    y = _block(y)
    start = time.perf_counter()
    phi = dict_joint4d(train.f, train.w, train.q_v, train.q_h, *grids.grids(cfg), **dict_kwargs)
    fit = omp(phi, y.reshape(-1, order="F"), cfg.n_paths)
    lab = fit.labels
    h_hat = assemble_channel(cfg, lab[:, 0], lab[:, 1], lab[:, 2], lab[:, 3], fit.coef)
    report = EstimateReport(
        method="joint-cs", h_hat=h_hat,
        paths=dict(psi_t=lab[:, 0], psi_r=lab[:, 1], mu_v=lab[:, 2], mu_h=lab[:, 3], alpha=fit.coef),
        runtime_s=time.perf_counter() - start,
    )
    if h_true is not None:
        report.nmse = nmse_of(h_true, h_hat)
    return report


def run_ls(y, train, cfg, h_true=None):
    start = time.perf_counter()
    h_hat = ls_estimate(y, train, cfg)
    report = EstimateReport(method="ls", h_hat=h_hat, runtime_s=time.perf_counter() - start)
    if h_true is not None:
        report.nmse = nmse_of(h_true, h_hat)
    return report


def _wrap(d):
    return (np.asarray(d) + np.pi) % TWO_PI - np.pi


def path_errors(paths, channels):
    """RMS wrapped frequency errors ``(psi_rmse, mu_rmse)`` after optimal matching.

    Estimated paths are matched to true cascaded paths by minimizing the
    squared (psi_t, psi_r) distance; the RIS error reuses that matching.
    """
    if not paths:
        return float("nan"), float("nan")
    est_psi = np.column_stack([paths["psi_t"], paths["psi_r"]])
    true_psi = np.column_stack([channels.psi_t_eff, channels.psi_r_eff])
    cost = (_wrap(est_psi[:, None, :] - true_psi[None, :, :]) ** 2).sum(axis=2)
    rows, cols = linear_sum_assignment(cost)
    psi_rmse = np.sqrt(cost[rows, cols].sum() / (2 * len(rows)))
    est_mu = np.column_stack([paths["mu_v"], paths["mu_h"]])[rows]
    true_mu = np.column_stack([channels.mu_v_eff, channels.mu_h_eff])[cols]
    mu_rmse = np.sqrt((_wrap(est_mu - true_mu) ** 2).sum() / (2 * len(rows)))
    return float(psi_rmse), float(mu_rmse)
