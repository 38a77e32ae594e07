import numpy as np
import pytest

from risopt.baselines import (
    alternating_opt,
    ao_initializer,
    exhaustive_search,
    quantize_phases,
    tmh,
    tmh_coupling,
)
from risopt.errors import SpaceTooLarge
from risopt.priors import enumerate_sequences


def test_exhaustive_search_finds_first_minimizer():
    table = np.random.default_rng(0).uniform(size=(3,) * 5)
    table[1, 2, 0, 1, 2] = -1.0
    table[2, 0, 0, 0, 0] = -1.0  # later duplicate of the minimum

    def leaf(idx):
        return float(table[tuple(idx)])

    seq, value, evals = exhaustive_search(leaf, 3, 5)
    assert tuple(seq.phases) == (1, 2, 0, 1, 2)  # lexicographically first
    assert value == -1.0
    assert evals == 3**5


def test_exhaustive_search_uses_batch_interface():
    calls = {"batch": 0}

    class Obj:
        def batch(self, rows):
            calls["batch"] += 1
            return np.asarray(rows).sum(axis=1).astype(float)

    seq, value, _ = exhaustive_search(Obj(), 3, 4)
    assert tuple(seq.phases) == (0, 0, 0, 0)
    assert value == 0.0
    assert calls["batch"] >= 1


def test_exhaustive_search_space_cap():
    with pytest.raises(SpaceTooLarge):
        exhaustive_search(lambda i: 0.0, 3, 20, progress_cap=10**6)


def test_quantize_phases_circular_nearest():
    alphabet = np.array([0.0, 2 * np.pi / 3, 4 * np.pi / 3])
    angles = np.array([0.1, -0.1, 2 * np.pi - 0.05, np.pi, np.pi / 3])
    idx = quantize_phases(angles, alphabet)
    assert idx[:3].tolist() == [0, 0, 0]  # wraparound lands on 0
    assert idx[3] in (1, 2)
    assert idx[4] in (0, 1)  # exact tie up to rounding
    # A symmetric tie resolves to the lowest index.
    assert quantize_phases(np.array([np.pi / 2]), np.array([0.0, np.pi]))[0] == 0


def test_tmh_coupling_hermitian(small_chan, small_trx):
    z = tmh_coupling(small_chan, small_trx)
    assert z.shape == (small_chan.r_mat.shape[0],) * 2
    assert np.allclose(z, z.conj().T)


def test_tmh_modes_agree_on_trace_quality(small_cfg, small_chan, small_trx):
    z = tmh_coupling(small_chan, small_trx)
    alphabet = small_cfg.alphabet_array

    def trace_value(seq):
        u = np.exp(1j * alphabet[seq.phases])
        return float((u.conj() @ z @ u).real)

    quantized = tmh(small_chan, small_trx, small_cfg)
    exact = tmh(small_chan, small_trx, small_cfg, exhaustive=True)
    assert len(quantized) == small_cfg.n_ris
    quantized.validate(small_cfg.alphabet_size)
    # The enumerated mode maximizes the trace form over the whole alphabet.
    rows = enumerate_sequences(small_cfg.alphabet_size, small_cfg.n_ris)
    u = np.exp(1j * alphabet[rows])
    all_traces = np.einsum("bi,ij,bj->b", u.conj(), z, u).real
    assert trace_value(exact) == pytest.approx(all_traces.max())
    assert trace_value(quantized) <= trace_value(exact) + 1e-9


def test_ao_initializer_variants(small_cfg, small_chan):
    trx1, seq1 = ao_initializer(small_chan, small_cfg, "ao1")
    assert len(seq1) == small_cfg.n_ris
    seq1.validate(small_cfg.alphabet_size)
    rng = np.random.default_rng(0)
    trx2, seq2 = ao_initializer(small_chan, small_cfg, "ao2", rng)
    assert np.allclose(np.abs(trx2.f_a), 1 / np.sqrt(small_cfg.n_tx))
    seq2.validate(small_cfg.alphabet_size)
    with pytest.raises(ValueError):
        ao_initializer(small_chan, small_cfg, "ao2")  # needs an rng
    with pytest.raises(ValueError):
        ao_initializer(small_chan, small_cfg, "ao3")


@pytest.mark.parametrize("variant", ["ao1", "ao2"])
def test_alternating_opt_monotone(small_cfg, small_chan, variant):
    rng = np.random.default_rng(11)
    init = ao_initializer(small_chan, small_cfg, variant, rng)
    trx, seq, history = alternating_opt(small_chan, small_cfg, init, max_rounds=6)
    assert len(history) >= 2
    assert all(b <= a + 1e-12 for a, b in zip(history, history[1:]))
    assert seq.objective_value == pytest.approx(history[-1])
    seq.validate(small_cfg.alphabet_size)
    assert trx.f_s is not None and trx.w_s is not None
