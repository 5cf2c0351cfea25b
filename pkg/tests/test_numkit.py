import numpy as np
import pytest
from hypothesis import given, settings

from ristrice import numkit as nk

from conftest import crandn, seeds


def test_kron_identity_and_scalar(rng):
    np.testing.assert_array_equal(nk.kron(np.eye(2), np.eye(2)), np.eye(4))
    b = crandn(rng, 3, 2)
    np.testing.assert_allclose(nk.kron([[2]], b), 2 * b)


@given(seeds)
@settings(max_examples=30)
def test_kron_mixed_product(seed):
    r = np.random.default_rng(seed)
    a, b, c, d = (crandn(r, 2, 2) for _ in range(4))
    np.testing.assert_allclose(nk.kron(a, c) @ nk.kron(b, d), nk.kron(a @ b, c @ d), atol=1e-12)


def test_khatri_rao_basic(rng):
    a = crandn(rng, 3)
    b = crandn(rng, 2)
    np.testing.assert_allclose(nk.khatri_rao(a[:, None], b[:, None])[:, 0], np.kron(a, b))
    expected = np.zeros((4, 2))
    expected[0, 0] = expected[3, 1] = 1
    np.testing.assert_array_equal(nk.khatri_rao(np.eye(2), np.eye(2)), expected)


def test_khatri_rao_column_mismatch(rng):
    with pytest.raises(ValueError):
        nk.khatri_rao(crandn(rng, 3, 2), crandn(rng, 3, 3))


@given(seeds)
@settings(max_examples=30)
def test_khatri_rao_columns_and_property2(seed):
    r = np.random.default_rng(seed)
    a, b = crandn(r, 3, 2), crandn(r, 2, 4)
    c, d = crandn(r, 2, 3), crandn(r, 3, 4)
    kr = nk.khatri_rao(b, d)
    for i in range(4):
        np.testing.assert_array_equal(kr[:, i], np.kron(b[:, i], d[:, i]))
    np.testing.assert_allclose(nk.khatri_rao(a @ b, c @ d), nk.kron(a, c) @ kr, atol=1e-12)


def test_hadamard(rng):
    a = crandn(rng, 5)
    np.testing.assert_array_equal(nk.hadamard(a, np.ones(5)), a)
    np.testing.assert_array_equal(nk.hadamard(a, np.zeros(5)), np.zeros(5))
    with pytest.raises(ValueError):
        nk.hadamard(a, np.ones(4))


def test_hadamard_of_steering_vectors_adds_frequencies():
    m = np.arange(7)
    nu1, nu2 = 0.4, 1.9
    np.testing.assert_allclose(nk.hadamard(np.exp(1j * m * nu1), np.exp(1j * m * nu2)),
                               np.exp(1j * m * (nu1 + nu2)), atol=1e-13)


def test_vec_unvec(rng):
    np.testing.assert_array_equal(nk.vec(np.eye(2)), [1, 0, 0, 1])
    a = crandn(rng, 3, 2)
    np.testing.assert_array_equal(nk.unvec(nk.vec(a), 3, 2), a)
    with pytest.raises(ValueError):
        nk.unvec(np.ones(5), 2, 3)


@given(seeds)
@settings(max_examples=30)
def test_vec_property1(seed):
    r = np.random.default_rng(seed)
    a, b, c = crandn(r, 2, 3), crandn(r, 3, 4), crandn(r, 4, 2)
    np.testing.assert_allclose(nk.vec(a @ b @ c), nk.kron(c.T, a) @ nk.vec(b), atol=1e-12)


@given(seeds)
@settings(max_examples=30)
def test_kron_of_vectors_is_vec_of_outer(seed):
    r = np.random.default_rng(seed)
    a, b = crandn(r, 4), crandn(r, 3)
    np.testing.assert_allclose(np.kron(a, b), nk.vec(np.outer(b, a)), atol=1e-14)


def test_pinv_examples():
    np.testing.assert_allclose(nk.pinv(np.eye(3)), np.eye(3))
    np.testing.assert_allclose(nk.pinv(np.diag([2.0, 0.0])), np.diag([0.5, 0.0]))
    np.testing.assert_array_equal(nk.pinv(np.zeros((2, 3))), np.zeros((3, 2)))


@given(seeds)
@settings(max_examples=30)
def test_pinv_penrose_axioms(seed):
    r = np.random.default_rng(seed)
    a = crandn(r, 4, 2) @ crandn(r, 2, 3)  # rank deficient on purpose
    p = nk.pinv(a)
    np.testing.assert_allclose(a @ p @ a, a, atol=1e-10)
    np.testing.assert_allclose(p @ a @ p, p, atol=1e-10)
    np.testing.assert_allclose((a @ p).conj().T, a @ p, atol=1e-10)
    np.testing.assert_allclose((p @ a).conj().T, p @ a, atol=1e-10)


def test_lstsq(rng):
    b = crandn(rng, 4)
    np.testing.assert_allclose(nk.lstsq(np.eye(4), b), b)
    a = crandn(rng, 6, 3)
    x0 = crandn(rng, 3)
    np.testing.assert_allclose(nk.lstsq(a, a @ x0), x0, atol=1e-12)
    wide = crandn(rng, 3, 6)
    x = nk.lstsq(wide, wide @ crandn(rng, 6))
    assert np.linalg.norm(wide @ x - wide @ nk.lstsq(wide, wide @ x)) < 1e-10
    with pytest.raises(ValueError):
        nk.lstsq(a, np.ones(5))


def test_rank1_exact_and_zero(rng):
    x, y = crandn(rng, 4), crandn(rng, 3)
    u, s, v = nk.rank1_approx(np.outer(x, y.conj()))
    assert s == pytest.approx(np.linalg.norm(x) * np.linalg.norm(y))
    assert abs(abs(np.vdot(u, x)) - np.linalg.norm(x)) < 1e-12
    assert abs(abs(np.vdot(v, y)) - np.linalg.norm(y)) < 1e-12
    assert nk.rank1_approx(np.zeros((3, 2)))[1] == 0


def test_rank1_beats_random_candidates(rng):
    a = crandn(rng, 4, 3)
    u, s, v = nk.rank1_approx(a)
    assert np.linalg.norm(u) == pytest.approx(1) and np.linalg.norm(v) == pytest.approx(1)
    best = np.linalg.norm(a - s * np.outer(u, v.conj()))
    for _ in range(100):
        p, q = crandn(rng, 4), crandn(rng, 3)
        # optimal scale for a fixed direction pair
        p, q = p / np.linalg.norm(p), q / np.linalg.norm(q)
        c = np.vdot(p, a @ q)
        assert best <= np.linalg.norm(a - c * np.outer(p, q.conj())) + 1e-12
