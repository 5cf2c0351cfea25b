"""Frequency grids, structured dictionaries and greedy sparse solvers."""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .chanmodel import TWO_PI, steering_matrix
from .numkit import lstsq

ATOM_CAP = 2 ** 20
DENSE_CAP = 2 ** 24  # complex entries held in memory for a dense dictionary


class DictionaryTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class Grid:
    points: np.ndarray
    sector: tuple

    def __len__(self):
        return len(self.points)


def make_grid(sector, count):
    """``count`` uniform points over ``[lo, hi)``, ``lo`` included."""
    lo, hi = map(float, sector)
    if not hi > lo:
        raise ValueError(f"empty sector [{lo}, {hi})")
    if count < 1:
        raise ValueError("grid needs at least one point")
    return Grid(lo + (hi - lo) * np.arange(count) / count, (lo, hi))


def beam_grid(m, k, beta=1, full_circle=False):
    """Grid of spacing ``2 pi / (beta m)``, i.e. ``beta`` points per DFT beam.

    By default only the ``beta k`` points covering the ``k`` training beams,
    ``[0, 2 pi k / m)``, are kept; with ``full_circle`` the grid spans
    ``[0, 2 pi)`` with ``beta m`` points.
    """
    if full_circle:
        return make_grid((0.0, TWO_PI), beta * m)
    return make_grid((0.0, TWO_PI * k / m), beta * k)


@dataclass(frozen=True)
class GridSpec:
    """Grid refinement factors; ``GridSpec()`` is the C.1 setting."""

    beta_t: int = 1
    beta_r: int = 1
    beta_sv: int = 1
    beta_sh: int = 1
    full_circle: bool = False

    def grids(self, cfg):
        """``(grid_t, grid_r, grid_v, grid_h)`` for ``cfg``."""
        fc = self.full_circle
        return (
            beam_grid(cfg.m_t, cfg.k_t, self.beta_t, fc),
            beam_grid(cfg.m_r, cfg.n_r, self.beta_r, fc),
            beam_grid(cfg.m_sv, cfg.k_sv, self.beta_sv, fc),
            beam_grid(cfg.m_sh, cfg.k_sh, self.beta_sh, fc),
        )

    def counts(self, cfg):
        return tuple(len(g) for g in self.grids(cfg))


C1 = GridSpec()
C2 = GridSpec(beta_t=2, beta_r=4, beta_sv=8, beta_sh=8)


@dataclass
class Dictionary:
    """Dense dictionary: one atom per column, one label row per atom."""

    atoms: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        self.labels = np.atleast_2d(np.asarray(self.labels, dtype=float))
        if self.labels.shape[0] != self.atoms.shape[1]:
            raise ValueError("one label per atom required")

    @property
    def n_atoms(self):
        return self.atoms.shape[1]

    @property
    def dim(self):
        return self.atoms.shape[0]

    @cached_property
    def norms(self):
        return np.linalg.norm(self.atoms, axis=0)

    def correlate(self, r):
        """Inner products of every atom with each column of ``r``."""
        return self.atoms.conj().T @ r

    def columns(self, idx):
        return self.atoms[:, idx]


@dataclass
class KroneckerDictionary:
    """Atoms ``kron(outer_i, inner_j)`` at index ``i * inner.n_atoms + j``.

    Never materializes the full atom matrix; correlations use the identity
    ``<kron(a, b), r> = a^H R conj(b)`` with ``R`` the row-major reshape of
    ``r``.  Labels are ``(inner labels, outer labels)``.
    """

    outer: Dictionary
    inner: Dictionary
    _norms: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self._norms = np.outer(self.outer.norms, self.inner.norms).ravel()

    @property
    def n_atoms(self):
        return self.outer.n_atoms * self.inner.n_atoms

    @property
    def dim(self):
        return self.outer.dim * self.inner.dim

    @property
    def norms(self):
        return self._norms

    @cached_property
    def labels(self):
        n_in = self.inner.n_atoms
        i_out, i_in = np.divmod(np.arange(self.n_atoms), n_in)
        return np.hstack([self.inner.labels[i_in], self.outer.labels[i_out]])

    def correlate(self, r):
        r = np.asarray(r)
        squeeze = r.ndim == 1
        r = r.reshape(self.dim, -1)
        out = np.empty((self.n_atoms, r.shape[1]), dtype=complex)
        for c in range(r.shape[1]):
            mat = r[:, c].reshape(self.outer.dim, self.inner.dim)
            out[:, c] = (self.outer.atoms.conj().T @ mat @ self.inner.atoms.conj()).ravel()
        return out[:, 0] if squeeze else out

    def columns(self, idx):
        i_out, i_in = np.divmod(np.atleast_1d(idx), self.inner.n_atoms)
        cols = [np.kron(self.outer.atoms[:, o], self.inner.atoms[:, i]) for o, i in zip(i_out, i_in)]
        cols = np.stack(cols, axis=1)
        return cols[:, 0] if np.ndim(idx) == 0 else cols

    def dense(self):
        return Dictionary(np.kron(self.outer.atoms, self.inner.atoms), self.labels)


def _pair_dictionary(op_a, grid_a, op_b, grid_b):
    """Atoms ``kron(op_a v(x), op_b v(y))`` over the grid product, labels (x, y)."""
    a = op_a @ steering_matrix(grid_a.points, op_a.shape[1])
    b = op_b @ steering_matrix(grid_b.points, op_b.shape[1])
    xs, ys = np.meshgrid(grid_a.points, grid_b.points, indexing="ij")
    return Dictionary(np.kron(a, b), np.column_stack([xs.ravel(), ys.ravel()]))


def dict_stage1(f, w, grid_t, grid_r):
    """Atoms ``kron(F^T v(psi_t), W^T v(psi_r))`` labelled ``(psi_t, psi_r)``."""
    return _pair_dictionary(f.T, grid_t, w.T, grid_r)


def dict_stage2(q_v, q_h, grid_v, grid_h):
    """Atoms ``kron(Q_v^T v(mu_v), Q_h^T v(mu_h))`` labelled ``(mu_v, mu_h)``."""
    return _pair_dictionary(q_v.T, grid_v, q_h.T, grid_h)


def dict_joint4d(f, w, q_v, q_h, grid_t, grid_r, grid_v, grid_h,
                 atom_cap=ATOM_CAP, dense_cap=DENSE_CAP):
    """4D dictionary for ``vec(Y)``, labelled ``(psi_t, psi_r, mu_v, mu_h)``.

    Since ``Q = kron(Q_v, Q_h)`` the atom ``kron(Q^T v2d(mu_v, mu_h),
    kron(F^T v(psi_t), W^T v(psi_r)))`` is the Kronecker product of a stage-2
    atom with a stage-1 atom.  The matrix is only materialized when it has at
    most ``dense_cap`` entries.
    """
    n_atoms = len(grid_t) * len(grid_r) * len(grid_v) * len(grid_h)
    if n_atoms > atom_cap:
        raise DictionaryTooLarge(f"joint dictionary would have {n_atoms} atoms (cap {atom_cap})")
    lazy = KroneckerDictionary(dict_stage2(q_v, q_h, grid_v, grid_h), dict_stage1(f, w, grid_t, grid_r))
    if n_atoms * lazy.dim <= dense_cap:
        return lazy.dense()
    return lazy


@dataclass
class SparseFit:
    indices: np.ndarray
    labels: np.ndarray
    coef: np.ndarray  # (L,) for omp, (L, snapshots) for somp
    residual_norm: float
    residual_history: list


def _greedy(phi, y, sparsity):
    if sparsity < 1 or sparsity > phi.n_atoms:
        raise ValueError(f"sparsity {sparsity} outside [1, {phi.n_atoms}]")
    y2 = y.reshape(phi.dim, -1)
    norms = phi.norms
    safe = np.where(norms > 0, norms, 1.0)
    chosen = []
    residual = y2
    coef = np.zeros((0, y2.shape[1]), dtype=complex)
    history = [float(np.linalg.norm(residual))]
    for _ in range(sparsity):
        corr = phi.correlate(residual)
        score = np.linalg.norm(corr, axis=1) / safe
        score[norms == 0] = -1.0
        score[chosen] = -np.inf
        chosen.append(int(np.argmax(score)))
        sub = phi.columns(np.array(chosen))
        coef = lstsq(sub, y2)
        residual = y2 - sub @ coef
        history.append(float(np.linalg.norm(residual)))
    idx = np.array(chosen)
    return SparseFit(idx, phi.labels[idx], coef, history[-1], history)


def omp(phi, y, sparsity):
    """Orthogonal matching pursuit with a fixed number of atoms.

    Atoms are normalized for selection only; the refit uses the raw atoms so
    coefficients keep their physical scale.  Ties go to the lowest index.
    """
    fit = _greedy(phi, np.asarray(y, dtype=complex).ravel(), sparsity)
    fit.coef = fit.coef[:, 0]
    return fit


def somp(phi, y, sparsity):
    """Simultaneous OMP: rows of the coefficient matrix share one support."""
    y = np.asarray(y, dtype=complex)
    if y.ndim == 1:
        y = y[:, None]
    return _greedy(phi, y, sparsity)


def grid_steps(grids, cfg):
    """Point spacing of each of the four grids of ``grids`` (a GridSpec)."""
    return tuple(g.points[1] - g.points[0] if len(g) > 1 else TWO_PI for g in grids.grids(cfg))
