import numpy as np
import pytest

from ristrice.chanmodel import ChannelParams, SystemConfig, realize, sample_paths
from ristrice.sensing import add_noise, nmse, synthesize
from ristrice.training import build_training, dft_matrix, validate_config

from conftest import crandn

FULL_CFG = SystemConfig(m_t=64, m_r=32, m_sv=16, m_sh=16, n_r=8, k_t=8, k_sv=4, k_sh=4, l_t=2, l_r=2)


def test_dft_matrix():
    np.testing.assert_allclose(dft_matrix(1), [[1]])
    np.testing.assert_allclose(dft_matrix(2), np.array([[1, 1], [1, -1]]) / np.sqrt(2), atol=1e-15)
    for m in range(1, 17):
        u = dft_matrix(m)
        np.testing.assert_allclose(u.conj().T @ u, np.eye(m), atol=1e-12)


def test_build_training_structure():
    tr = build_training(FULL_CFG)
    assert tr.f.shape == (64, 8)
    np.testing.assert_allclose(tr.f.conj().T @ tr.f, np.eye(8), atol=1e-12)
    np.testing.assert_array_equal(tr.q, np.kron(tr.q_v, tr.q_h))
    np.testing.assert_allclose(np.abs(tr.q), 1 / np.sqrt(FULL_CFG.m_s), atol=1e-12)
    for mat in (tr.w, tr.f, tr.q_v, tr.q_h):
        np.testing.assert_allclose(mat.T @ mat.conj(), np.eye(mat.shape[1]), atol=1e-12)
    full = build_training(SystemConfig(n_r=8))
    np.testing.assert_allclose(full.w.T, dft_matrix(8))


def test_validate_full_scale_config_passes():
    assert validate_config(FULL_CFG, "trice-bes").ok
    assert all(c.passed for c in validate_config(FULL_CFG, "trice-bes").conditions)


def test_validate_table_failures():
    small_ks = SystemConfig(k_sv=2, k_sh=1)
    assert "K_S >= L" in validate_config(small_ks, "trice-bes").failures
    few_rf = SystemConfig(n_r=2)
    assert "N_R >= L_R+1" in validate_config(few_rf, "trice-bes").failures


def test_validate_cs_is_warning_only():
    cfg = SystemConfig(n_r=2, k_t=2)
    rep = validate_config(cfg, "joint-cs")
    assert rep.ok
    with pytest.raises(ValueError):
        validate_config(cfg, "music")


def _subframe_oracle(cfg, ch, tr):
    """Stack y_{s,t} = W^T H_R diag(q_s) H_T f_t over t, then s."""
    cols = []
    for s in range(cfg.k_s):
        ys = [tr.w.T @ ch.h_r @ np.diag(tr.q[:, s]) @ ch.h_t @ tr.f[:, t] for t in range(cfg.k_t)]
        cols.append(np.concatenate(ys))
    return np.stack(cols, axis=1)


@pytest.mark.parametrize("seed", range(5))
def test_synthesize_matches_subframe_model(seed, desk):
    ch = realize(desk, sample_paths(desk, np.random.default_rng(seed)))
    tr = build_training(desk)
    y0 = synthesize(desk, ch, tr)
    np.testing.assert_allclose(y0, _subframe_oracle(desk, ch, tr), atol=1e-11)
    at = tr.f.T @ ch.h_t.T
    ar = tr.w.T @ ch.h_r
    kr = (at[:, None, :] * ar[None, :, :]).reshape(-1, desk.m_s)
    np.testing.assert_allclose(y0[:, 3], kr @ tr.q[:, 3], atol=1e-11)


def test_synthesize_zero_and_all_ones(desk):
    tr = build_training(desk)
    np.testing.assert_array_equal(synthesize(desk, np.zeros((desk.m_r * desk.m_t, desk.m_s)), tr), 0)
    cfg = SystemConfig(l_t=1, l_r=1)
    z, one = np.zeros(1), np.ones(1, dtype=complex)
    ch = realize(cfg, ChannelParams(z, z, z, z, z, z, one, one))
    y0 = synthesize(cfg, ch, tr)
    # all-ones steering only excites beam 0 of each DFT codebook
    expected = np.zeros_like(y0)
    expected[0, 0] = np.sqrt(cfg.m_t) * np.sqrt(cfg.m_r) * np.sqrt(cfg.m_s)
    np.testing.assert_allclose(y0, expected, atol=1e-11)
    with pytest.raises(ValueError):
        synthesize(desk, np.zeros((3, 3)), tr)


def test_add_noise_definitions(rng):
    y0 = crandn(rng, 16, 16)
    clean = add_noise(y0, np.inf, rng)
    np.testing.assert_array_equal(clean.y, y0)
    assert clean.sigma2 == 0
    assert add_noise(y0, 0.0, rng).sigma2 == pytest.approx(np.linalg.norm(y0) ** 2 / y0.size)
    with pytest.raises(ValueError):
        add_noise(np.zeros((2, 2)), 10.0, rng)


def test_add_noise_monte_carlo_snr(rng):
    y0 = crandn(rng, 8, 4)
    snr_db = 7.0
    noise = [np.linalg.norm(add_noise(y0, snr_db, rng).y - y0) ** 2 for _ in range(10_000)]
    ratio = np.linalg.norm(y0) ** 2 / np.mean(noise)
    assert abs(ratio / 10 ** (snr_db / 10) - 1) < 0.05


def test_nmse(rng):
    h = crandn(rng, 6, 4)
    assert nmse(h, h) == 0
    assert nmse(h, np.zeros_like(h)) == 1
    assert nmse(h, 2 * h) == pytest.approx(1)
    u = np.linalg.qr(crandn(rng, 6, 6))[0]
    v = np.linalg.qr(crandn(rng, 4, 4))[0]
    g = crandn(rng, 6, 4)
    assert nmse(u @ h @ v, u @ g @ v) == pytest.approx(nmse(h, g))
    with pytest.raises(ValueError):
        nmse(h, h[:, :2])
    with pytest.raises(ValueError):
        nmse(np.zeros_like(h), h)
