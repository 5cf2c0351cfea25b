"""Dense complex linear-algebra kernels.

All routines take and return numpy arrays.  ``vec``/``unvec`` use
column-major (Fortran) ordering throughout the package.
"""

import numpy as np

PINV_RTOL = 1e-12


def _as_matrix(a):
    a = np.asarray(a, dtype=complex)
    if a.ndim == 1:
        a = a[:, None]
    if a.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {a.shape}")
    return a


def kron(a, b):
    """Kronecker product of two matrices (or vectors)."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def khatri_rao(a, b):
    """Column-wise Kronecker product; column i is ``kron(a[:, i], b[:, i])``."""
    a = _as_matrix(a)
    b = _as_matrix(b)
    if a.shape[1] != b.shape[1]:
        raise ValueError(
            f"khatri_rao needs equal column counts, got {a.shape[1]} and {b.shape[1]}")
    return (a[:, None, :] * b[None, :, :]).reshape(a.shape[0] * b.shape[0], a.shape[1])


def hadamard(a, b):
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValueError(f"hadamard needs equal shapes, got {a.shape} and {b.shape}")
    return a * b


def vec(a):
    """Stack the columns of ``a`` into one vector."""
    return np.asarray(a).reshape(-1, order="F")


def unvec(v, rows, cols):
    v = np.asarray(v)
    if v.size != rows * cols:
        raise ValueError(f"cannot unvec length {v.size} into {rows}x{cols}")
    return v.reshape(rows, cols, order="F")


def pinv(a, tol=PINV_RTOL):
    """Moore-Penrose pseudo-inverse through the SVD.

    Singular values below ``tol`` times the largest one are dropped.  A zero
    matrix maps to the (transposed-shape) zero matrix.
    """
    a = np.asarray(a, dtype=complex)
    if a.size == 0 or not np.any(a):
        return np.zeros(a.shape[::-1], dtype=complex)
    u, s, vh = np.linalg.svd(a, full_matrices=False)
    keep = s > tol * s[0]
    return (vh[keep].conj().T / s[keep]) @ u[:, keep].conj().T


def lstsq(a, b, tol=PINV_RTOL):
    """Minimum-norm least-squares solution ``pinv(a) @ b``."""
    a = _as_matrix(a)
    b = np.asarray(b, dtype=complex)
    if a.shape[0] != b.shape[0]:
        raise ValueError(f"lstsq: {a.shape[0]} rows vs right-hand side of length {b.shape[0]}")
    return pinv(a, tol) @ b


def rank1_approx(a):
    """Dominant singular triplet ``(u, s, v)`` with ``a ~ s * u v^H``."""
    a = _as_matrix(a)
    u, s, vh = np.linalg.svd(a, full_matrices=False)
    return u[:, 0], float(s[0]), vh[0].conj()


def numerical_rank(a, tol=1e-8):
    s = np.linalg.svd(_as_matrix(a), compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > tol * s[0]))
