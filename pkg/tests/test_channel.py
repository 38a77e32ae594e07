import numpy as np
import pytest

from risopt.channel import steering_vector, synthesize_channel
from risopt.config import SystemConfig
from risopt.errors import ConfigError


def test_steering_vector_unit_norm_constant_modulus():
    v = steering_vector(0.37, 16)
    assert v.shape == (16,)
    assert np.linalg.norm(v) == pytest.approx(1.0)
    assert np.allclose(np.abs(v), 1 / np.sqrt(16))
    # Broadside: all elements in phase.
    assert np.allclose(steering_vector(0.0, 8), np.full(8, 1 / np.sqrt(8)))
    with pytest.raises(ConfigError):
        steering_vector(0.0, 0)


def test_channel_shapes_and_path_count(small_cfg, small_chan):
    assert small_chan.p_mat.shape == (small_cfg.n_rx, small_cfg.n_ris)
    assert small_chan.r_mat.shape == (small_cfg.n_ris, small_cfg.n_tx)
    assert small_chan.n_paths == small_cfg.n_interferers + 2
    assert small_chan.aoa.shape == (small_chan.n_paths,)


def test_channel_rank_capped_by_path_count():
    cfg = SystemConfig(n_tx=24, n_rx=24, n_rf_tx=4, n_rf_rx=4, n_streams=4,
                       n_ris=12, n_interferers=2)
    chan = synthesize_channel(cfg, np.random.default_rng(5))
    tol = 1e-9
    for mat in (chan.p_mat, chan.r_mat):
        s = np.linalg.svd(mat, compute_uv=False)
        assert np.sum(s > tol * s[0]) <= chan.n_paths


def test_direct_path_is_ten_db_weaker_on_average():
    cfg = SystemConfig(n_tx=8, n_rx=8, n_rf_tx=4, n_rf_rx=4, n_streams=4,
                       n_ris=6, n_interferers=4)
    rng = np.random.default_rng(99)
    reflected, direct = [], []
    for _ in range(400):
        g = synthesize_channel(cfg, rng).path_gains
        reflected.append(np.mean(np.abs(g[:-1]) ** 2))
        direct.append(np.abs(g[-1]) ** 2)
    ratio = np.mean(reflected) / np.mean(direct)
    assert 10 ** 0.8 < ratio < 10 ** 1.2


def test_effective_channel_composition(small_chan, small_cfg):
    rng = np.random.default_rng(3)
    phases = rng.uniform(0, 2 * np.pi, small_cfg.n_ris)
    direct = small_chan.p_mat @ np.diag(np.exp(1j * phases)) @ small_chan.r_mat
    assert np.allclose(small_chan.effective(phases), direct)


def test_synthesis_deterministic_given_seed(small_cfg):
    a = synthesize_channel(small_cfg, np.random.default_rng(7))
    b = synthesize_channel(small_cfg, np.random.default_rng(7))
    assert np.array_equal(a.p_mat, b.p_mat)
    assert np.array_equal(a.r_mat, b.r_mat)
    assert np.array_equal(a.path_gains, b.path_gains)
