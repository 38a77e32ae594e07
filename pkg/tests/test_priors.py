import numpy as np
import pytest

from risopt.errors import AlphabetViolation, EmptyPool
from risopt.priors import (
    ConditionalPrior,
    PhaseSequence,
    empirical_conditional,
    entropy_rate,
    enumerate_sequences,
    estimate_prior,
    is_strongly_typical,
    kl_divergence,
    log_prob,
    sample_candidate_pool,
    uniform_prior,
    weak_typicality_gap,
)


def test_phase_sequence_validation():
    seq = PhaseSequence([0, 1, 2, 1])
    assert len(seq) == 4
    seq.validate(3)
    with pytest.raises(AlphabetViolation):
        PhaseSequence([0, 3]).validate(3)


def test_conditional_prior_validation():
    ok = ConditionalPrior(np.array([0.5, 0.5]), np.full((2, 2), 0.5))
    assert ok.n_symbols == 2
    with pytest.raises(ValueError):
        ConditionalPrior(np.array([0.6, 0.5]), np.full((2, 2), 0.5))
    with pytest.raises(ValueError):
        ConditionalPrior(np.array([0.5, 0.5]), np.array([[0.9, 0.2], [0.5, 0.5]]))
    with pytest.raises(ValueError):
        ConditionalPrior(np.array([0.5, 0.5]), np.full((3, 3), 1 / 3))


def test_stage_marginals_propagate():
    t = np.array([[0.9, 0.1], [0.3, 0.7]])
    prior = ConditionalPrior(np.array([1.0, 0.0]), t)
    marg = prior.stage_marginals(3)
    assert np.allclose(marg[0], [1.0, 0.0])
    assert np.allclose(marg[1], t[0])
    assert np.allclose(marg[2], t[0] @ t)


def test_text_round_trip():
    prior = ConditionalPrior(np.array([0.25, 0.75]),
                             np.array([[0.125, 0.875], [0.6, 0.4]]))
    back = ConditionalPrior.from_text(prior.to_text())
    assert np.allclose(back.initial, prior.initial)
    assert np.allclose(back.transition, prior.transition)


def test_enumerate_sequences_lexicographic():
    rows = enumerate_sequences(3, 2)
    assert rows.shape == (9, 2)
    assert rows[0].tolist() == [0, 0]
    assert rows[1].tolist() == [0, 1]   # least-significant position last
    assert rows[-1].tolist() == [2, 2]
    assert np.array_equal(enumerate_sequences(3, 2, 4, 7), rows[4:7])


def test_sample_candidate_pool_enumerates_small_spaces(small_cfg, small_objective):
    rng = np.random.default_rng(0)
    pool = sample_candidate_pool(small_objective, small_cfg, budget=3**6, m=5, rng=rng)
    values = [s.objective_value for s in pool]
    assert values == sorted(values)
    all_vals = small_objective.batch(enumerate_sequences(3, small_cfg.n_ris))
    assert values == pytest.approx(np.sort(all_vals)[:5].tolist())
    with pytest.raises(EmptyPool):
        sample_candidate_pool(small_objective, small_cfg, budget=4, m=5, rng=rng)


def test_estimate_prior_counts_and_normalization():
    pool = [PhaseSequence([0, 1, 1, 2]), PhaseSequence([0, 1, 2, 2])]
    prior = estimate_prior(pool, n_symbols=3, n_stages=4, epsilon_floor=0.0)
    assert np.allclose(prior.initial, [1.0, 0.0, 0.0])
    assert np.allclose(prior.transition.sum(axis=1), 1.0)
    assert np.allclose(prior.raw_counts,
                       [[0, 2, 0], [0, 1, 2], [0, 0, 1]])
    assert prior.transition[0, 1] == pytest.approx(1.0)
    assert prior.transition[1, 2] == pytest.approx(2 / 3)
    with pytest.raises(EmptyPool):
        estimate_prior([], 3, 4)
    with pytest.raises(EmptyPool):
        estimate_prior(pool, 3, 5)


def test_epsilon_floor_keeps_log_probs_finite():
    pool = [PhaseSequence([0, 0, 0, 0])]
    prior = estimate_prior(pool, n_symbols=3, n_stages=4, epsilon_floor=1e-6)
    assert np.all(prior.transition >= 1e-6)
    assert np.isfinite(log_prob(PhaseSequence([2, 1, 0, 2]), prior))


def test_entropy_rate_and_log_prob_uniform_chain():
    m, k = 7, 3
    prior = uniform_prior(k, epsilon_floor=0.0)
    assert entropy_rate(prior, m) == pytest.approx(m * np.log2(k))
    seq = PhaseSequence([0, 1, 2, 0, 1, 2, 0])
    assert log_prob(seq, prior) == pytest.approx(-m * np.log2(k))
    assert weak_typicality_gap(seq, prior, m) == pytest.approx(0.0, abs=1e-12)


def test_empirical_conditional_normalizations():
    emp = empirical_conditional(PhaseSequence([0, 1, 0, 1, 1]), 2)
    assert np.allclose(emp.counts, [[0, 2], [1, 1]])
    assert np.allclose(emp.joint, emp.counts / 4)
    assert np.allclose(emp.conditional[0], [0.0, 1.0])
    assert np.allclose(emp.conditional[1], [0.5, 0.5])
    assert np.allclose(emp.initial_indicator, [1.0, 0.0])


def test_strong_typicality_of_long_chain_samples():
    rng = np.random.default_rng(5)
    prior = ConditionalPrior(np.full(3, 1 / 3),
                             np.array([[0.5, 0.3, 0.2],
                                       [0.2, 0.5, 0.3],
                                       [0.3, 0.2, 0.5]]))
    hits = sum(is_strongly_typical(prior.sample(2000, rng), prior, 0.2)[0]
               for _ in range(20))
    assert hits >= 15  # long samples concentrate around the prior statistics
    # A constant sequence is far from typical for this mixing chain.
    ok, dev = is_strongly_typical(PhaseSequence([0] * 2000), prior, 0.2)
    assert not ok and dev > 0.2


def test_kl_divergence_properties():
    p = ConditionalPrior(np.array([0.5, 0.5]), np.array([[0.8, 0.2], [0.3, 0.7]]))
    q = ConditionalPrior(np.array([0.4, 0.6]), np.array([[0.6, 0.4], [0.5, 0.5]]))
    assert kl_divergence(p, p, 10) == pytest.approx(0.0, abs=1e-12)
    assert kl_divergence(p, q, 10) > 0
