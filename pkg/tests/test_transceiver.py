import numpy as np
import pytest

from risopt.errors import DimensionMismatch, RankDeficient
from risopt.transceiver import (
    default_stream_precoder,
    design_hybrid_combiner,
    design_hybrid_precoder,
    finalize_digital,
    left_inverse,
    rank_limited_pinv,
    right_inverse,
    random_stream_precoder,
)


def _crandn(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def test_one_sided_inverses():
    rng = np.random.default_rng(0)
    fat = _crandn(rng, (4, 9))
    assert np.allclose(fat @ right_inverse(fat), np.eye(4), atol=1e-10)
    tall = _crandn(rng, (9, 4))
    assert np.allclose(left_inverse(tall) @ tall, np.eye(4), atol=1e-10)
    with pytest.raises(RankDeficient):
        right_inverse(np.zeros((3, 5)))


def test_rank_limited_pinv_full_rank_matches_pinv():
    rng = np.random.default_rng(1)
    a = _crandn(rng, (6, 6))
    assert np.allclose(rank_limited_pinv(a, 6), np.linalg.pinv(a), atol=1e-9)


def test_rank_limited_pinv_inverts_strongest_modes():
    rng = np.random.default_rng(2)
    u, _ = np.linalg.qr(_crandn(rng, (8, 8)))
    v, _ = np.linalg.qr(_crandn(rng, (8, 8)))
    s = np.array([10.0, 8.0, 5.0, 2.0, 1.0, 0.5, 0.2, 0.1])
    a = (u * s) @ v.conj().T
    pinv_r = rank_limited_pinv(a, 3)
    assert np.linalg.matrix_rank(pinv_r, tol=1e-9) == 3
    # On the top-3 right singular directions the composition is the identity.
    proj = pinv_r @ a
    assert np.allclose(proj @ v[:, :3], v[:, :3], atol=1e-9)
    assert np.allclose(proj @ v[:, 3:], 0.0, atol=1e-9)


def test_hybrid_precoder_structure(small_cfg, small_chan):
    f_a, f_d, residual = design_hybrid_precoder(small_chan.r_mat, small_cfg)
    assert f_a.shape == (small_cfg.n_tx, small_cfg.n_rf_tx)
    assert f_d.shape == (small_cfg.n_rf_tx, small_cfg.n_ris)
    assert np.allclose(np.abs(f_a), 1 / np.sqrt(small_cfg.n_tx))
    assert np.linalg.norm(f_a @ f_d) ** 2 == pytest.approx(small_cfg.n_streams)
    assert residual >= 0


def test_hybrid_combiner_structure(small_cfg, small_chan):
    w_a_h, w_d_h, _ = design_hybrid_combiner(small_chan.p_mat, small_cfg)
    assert w_a_h.shape == (small_cfg.n_rf_rx, small_cfg.n_rx)
    assert w_d_h.shape == (small_cfg.n_ris, small_cfg.n_rf_rx)
    assert np.allclose(np.abs(w_a_h), 1 / np.sqrt(small_cfg.n_rx))
    assert np.linalg.norm(w_d_h @ w_a_h) ** 2 == pytest.approx(small_cfg.n_streams)


def test_altmin_residual_history_non_increasing(small_cfg, small_chan):
    *_, history, _scale = design_hybrid_precoder(
        small_chan.r_mat, small_cfg, return_history=True)
    assert all(b <= a + 1e-12 for a, b in zip(history, history[1:]))


def test_stream_precoders_orthonormal():
    f_s = default_stream_precoder(6, 4)
    assert np.allclose(f_s.conj().T @ f_s, np.eye(4))
    q = random_stream_precoder(6, 4, np.random.default_rng(0))
    assert np.allclose(q.conj().T @ q, np.eye(4), atol=1e-10)


def test_finalize_digital_identity_gain():
    rng = np.random.default_rng(4)
    phases = rng.uniform(0, 2 * np.pi, 6)
    f_s = default_stream_precoder(6, 4)
    _, w_s = finalize_digital(f_s, phases)
    gain = w_s @ np.diag(np.exp(1j * phases)) @ f_s
    assert np.allclose(gain, np.eye(4), atol=1e-10)


def test_finalize_digital_rejects_bad_inputs():
    phases = np.zeros(6)
    with pytest.raises(DimensionMismatch):
        finalize_digital(np.ones((6, 2)), phases)  # not orthonormal columns
    with pytest.raises(DimensionMismatch):
        finalize_digital(default_stream_precoder(5, 2), phases)  # row mismatch
