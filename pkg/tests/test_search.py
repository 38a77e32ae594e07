import numpy as np
import pytest

from risopt.config import SystemConfig
from risopt.errors import BudgetExceeded
from risopt.priors import (
    ConditionalPrior,
    enumerate_sequences,
    estimate_prior,
    uniform_prior,
    PhaseSequence,
)
from risopt.search import (
    PriorPolicy,
    SearchConfig,
    find_best_children,
    idbp_search,
    mi_edge_score,
    rank_children,
)


def _tiny_cfg(n_ris=5):
    return SystemConfig(n_tx=8, n_rx=8, n_rf_tx=4, n_rf_rx=4, n_streams=4,
                        n_ris=n_ris, n_interferers=min(3, n_ris - 2))


def _table_objective(n_symbols, n_stages, seed):
    """Deterministic random leaf costs over the whole index space."""
    table = np.random.default_rng(seed).uniform(size=(n_symbols,) * n_stages)

    def leaf(idx):
        return float(table[tuple(np.asarray(idx, dtype=int))])

    leaf.table = table
    return leaf


def _peaked_prior(k=3):
    return ConditionalPrior(
        np.array([0.7, 0.2, 0.1]),
        np.array([[0.6, 0.3, 0.1], [0.2, 0.6, 0.2], [0.1, 0.3, 0.6]]),
    )


def test_search_config_validation():
    with pytest.raises(ValueError):
        SearchConfig(k_best=0)
    with pytest.raises(ValueError):
        idbp_search(_tiny_cfg(), SearchConfig(k_best=5), _peaked_prior(), lambda i: 0.0)


def test_prior_alphabet_must_match():
    prior = ConditionalPrior(np.array([0.5, 0.5]), np.full((2, 2), 0.5))
    with pytest.raises(ValueError):
        idbp_search(_tiny_cfg(), SearchConfig(), prior, lambda i: 0.0)


def test_mi_edge_score():
    assert mi_edge_score(0.0, 0.5, 0.5) == 0.0
    # Independent pair carries zero pointwise information.
    assert mi_edge_score(0.25, 0.5, 0.5) == pytest.approx(0.0)
    assert mi_edge_score(0.4, 0.5, 0.5) == pytest.approx(0.4 * np.log2(0.4 / 0.25))


def test_rank_children_order_and_ties():
    policy = PriorPolicy(_peaked_prior(), n_stages=4)
    symbols, costs = rank_children((1, 0), 0.0, policy, k_best=3)
    scores = policy.child_scores(1, 0)
    assert list(symbols) == list(np.argsort(-scores, kind="stable"))
    assert np.allclose(costs, scores[symbols])
    best, second, c1, c2 = find_best_children((1, 0), 0.0, policy)
    assert (best, second) == (symbols[0], symbols[1])
    assert c1 >= c2
    # Exact ties resolve toward the lowest alphabet index.
    u_policy = PriorPolicy(uniform_prior(3), n_stages=4)
    symbols, _ = rank_children((1, 0), 0.0, u_policy, k_best=3)
    assert list(symbols) == [0, 1, 2]


def test_two_best_visit_counts():
    # Single-pass side branching: one main path of M leaves total (the main
    # leaf plus one runner-up descent per interior stage), K score
    # evaluations per expanded node column.
    for m in (5, 9):
        cfg = _tiny_cfg(m)
        trace = idbp_search(cfg, SearchConfig(k_best=2), _peaked_prior(),
                            _table_objective(3, m, seed=m))
        assert trace.leaf_evaluations == m
        assert trace.nodes_expanded == m * (m + 1) // 2
        assert trace.mi_evaluations == 3 * (m + (m - 1) * (m - 2) // 2)
        greedy = idbp_search(cfg, SearchConfig(k_best=1), _peaked_prior(),
                             _table_objective(3, m, seed=m))
        assert greedy.leaf_evaluations == 1
        assert greedy.nodes_expanded == m
        assert greedy.mi_evaluations == 3 * m


def test_full_branching_recovers_subtree_minimum():
    # Side branching starts one stage in: the root commits to its best-scoring
    # first symbol (index 0 under a uniform prior's tie-break), and full
    # recursive branching then covers that entire subtree.
    m = 5
    cfg = _tiny_cfg(m)
    leaf = _table_objective(3, m, seed=42)
    trace = idbp_search(cfg, SearchConfig(k_best=3, recursive_second_pass=True),
                        uniform_prior(3), leaf)
    assert trace.leaf_evaluations == 3 ** (m - 1)
    assert trace.best_sequence.phases[0] == 0
    sub_best = np.unravel_index(np.argmin(leaf.table[0]), leaf.table[0].shape)
    assert tuple(trace.best_sequence.phases) == (0,) + sub_best
    assert trace.best_objective == pytest.approx(leaf.table[0].min())


def test_incumbent_history_non_increasing_and_deterministic():
    m = 6
    cfg = _tiny_cfg(m)
    pool = [PhaseSequence(row) for row in
            np.random.default_rng(0).integers(0, 3, size=(16, m))]
    prior = estimate_prior(pool, 3, m)
    leaf = _table_objective(3, m, seed=7)
    a = idbp_search(cfg, SearchConfig(), prior, leaf)
    b = idbp_search(cfg, SearchConfig(), prior, leaf)
    assert np.array_equal(a.best_sequence.phases, b.best_sequence.phases)
    assert a.best_objective == b.best_objective
    hist = a.objective_history
    assert all(y <= x for x, y in zip(hist, hist[1:]))
    assert hist[-1] == a.best_objective
    # The result is at least as good as the pure greedy descent.
    greedy = idbp_search(cfg, SearchConfig(k_best=1), prior, leaf)
    assert a.best_objective <= greedy.best_objective


def test_leaf_budget_enforced():
    cfg = _tiny_cfg(6)
    with pytest.raises(BudgetExceeded):
        idbp_search(cfg, SearchConfig(max_leaf_evals=3), _peaked_prior(),
                    _table_objective(3, 6, seed=1))


def test_trace_log_records_main_path(tmp_path):
    import io

    cfg = _tiny_cfg(5)
    log = io.StringIO()
    idbp_search(cfg, SearchConfig(), _peaked_prior(),
                _table_objective(3, 5, seed=3), trace_log=log)
    lines = log.getvalue().strip().splitlines()
    assert lines  # one line per expanded node on descents
    for line in lines:
        stage, symbol, score = line.split()
        assert 0 <= int(stage) < 5
        assert 0 <= int(symbol) < 3
        float(score)
