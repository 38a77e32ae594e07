"""Information-guided branch-and-prune over phase sequences.

The search walks one symbol per stage, scoring each candidate child by the
pointwise mutual information of the (parent, child) pair under the learned
Markov prior.  Only the top branch is followed everywhere; at interior nodes
of that main path the runner-up children spawn side branches that descend
greedily to a leaf.  Each leaf costs one objective evaluation, so the total
number of expensive evaluations is tiny compared with enumerating the space.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetExceeded
from .priors import ConditionalPrior, PhaseSequence


@dataclass(frozen=True)
class SearchConfig:
    """Knobs for the branch-and-prune walk.

    k_best
        How many top-scoring children to keep at each branch point.  1 is a
        pure greedy walk; 2 matches the default side-branching behaviour.
    recursive_second_pass
        If True, side branches themselves spawn side branches, growing the
        visited leaves toward 2^(M-1); guarded by ``max_leaf_evals``.
    """

    k_best: int = 2
    recursive_second_pass: bool = False
    max_leaf_evals: int = 100_000

    def __post_init__(self):
        if self.k_best < 1:
            raise ValueError("k_best must be >= 1")


@dataclass
class SearchTrace:
    """Accounting of one search run."""

    best_sequence: PhaseSequence | None = None
    best_objective: float = np.inf
    nodes_expanded: int = 0
    mi_evaluations: int = 0
    leaf_evaluations: int = 0
    objective_history: list = field(default_factory=list)


def mi_edge_score(p_joint: float, p_child: float, p_parent: float) -> float:
    """Pointwise mutual information (bits) of one parent->child transition."""
    if p_joint <= 0.0:
        return 0.0
    return float(p_joint * np.log2(p_joint / (p_child * p_parent)))


class PriorPolicy:
    """Wraps a prior with its propagated stage marginals for child scoring."""

    def __init__(self, prior: ConditionalPrior, n_stages: int):
        self.prior = prior
        self.n_stages = n_stages
        self.marginals = prior.stage_marginals(n_stages)

    def child_scores(self, stage: int, parent_symbol: int | None) -> np.ndarray:
        """Score of every candidate symbol at ``stage`` (0-based).

        The root stage has no parent; there the score of symbol i is its
        probability times its log-ratio against the uniform baseline, which
        preserves the argmax of the initial distribution.  Interior stages
        use the pointwise mutual information of the transition with the
        current stage marginals.
        """
        k = self.prior.n_symbols
        if stage == 0:
            p = self.prior.initial
            with np.errstate(divide="ignore", invalid="ignore"):
                scores = np.where(p > 0, p * np.log2(np.maximum(k * p, 1e-300)), 0.0)
            return scores
        mu_parent = self.marginals[stage - 1, parent_symbol]
        joint = self.prior.transition[parent_symbol] * mu_parent
        child = self.marginals[stage]
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(joint > 0, joint / np.maximum(child * mu_parent, 1e-300), 1.0)
            scores = np.where(joint > 0, joint * np.log2(ratio), 0.0)
        return scores


def rank_children(node_state, accumulated_cost: float, policy: PriorPolicy, k_best: int):
    """Top ``k_best`` children of a node by accumulated information score.

    ``node_state`` is (stage, parent_symbol); parent_symbol is None at the
    root.  Returns (symbols, costs), ties broken toward the lowest alphabet
    index.
    """
    stage, parent = node_state
    scores = policy.child_scores(stage, parent)
    order = np.argsort(-scores, kind="stable")[:k_best]
    return order, accumulated_cost + scores[order]


def find_best_children(node_state, accumulated_cost: float, prior_policy: PriorPolicy):
    """Best and second-best child of a node with their accumulated costs."""
    symbols, costs = rank_children(node_state, accumulated_cost, prior_policy, k_best=2)
    return int(symbols[0]), int(symbols[1]), float(costs[0]), float(costs[1])


def idbp_search(cfg, search_cfg: SearchConfig, prior: ConditionalPrior, leaf_objective,
                trace_log=None) -> SearchTrace:
    """Branch-and-prune search for the phase sequence minimizing an objective.

    Deterministic given (prior, objective): child ranking breaks ties by
    alphabet index and a strictly better leaf is required to displace the
    incumbent, so earlier-discovered leaves win exact ties.  ``trace_log``,
    if given, is a writable text stream receiving one line per expanded
    node: ``stage state score``.
    """
    n_stages, k = cfg.n_ris, cfg.alphabet_size
    if prior.n_symbols != k:
        raise ValueError("prior alphabet size does not match the configuration")
    if not 1 <= search_cfg.k_best <= k:
        raise ValueError(f"k_best must be within [1, {k}]")
    policy = PriorPolicy(prior, n_stages)
    trace = SearchTrace()

    def evaluate_leaf(prefix):
        if trace.leaf_evaluations >= search_cfg.max_leaf_evals:
            raise BudgetExceeded(
                f"leaf evaluation budget {search_cfg.max_leaf_evals} exhausted")
        value = float(leaf_objective(np.asarray(prefix, dtype=np.int64)))
        trace.leaf_evaluations += 1
        if value < trace.best_objective:
            trace.best_objective = value
            trace.best_sequence = PhaseSequence(np.asarray(prefix, dtype=np.int64), value)
        trace.objective_history.append(trace.best_objective)

    # Side branches start one stage in (except in the degenerate single-stage
    # problem, where the runner-up first symbols are themselves leaves).
    branch_from = 1 if n_stages > 1 else 0

    # Stack entries: (prefix, cost, may_branch).  may_branch distinguishes
    # the main path / recursive branches from one-shot greedy descents.
    stack = [((), 0.0, True)]
    while stack:
        prefix, cost, may_branch = stack.pop()
        while len(prefix) < n_stages:
            stage = len(prefix)
            parent = prefix[-1] if prefix else None
            symbols, costs = rank_children((stage, parent), cost, policy,
                                           search_cfg.k_best)
            trace.mi_evaluations += k
            if may_branch and stage >= branch_from:
                for sym, c in zip(symbols[1:], costs[1:]):
                    stack.append((prefix + (int(sym),), float(c),
                                  search_cfg.recursive_second_pass))
                    trace.nodes_expanded += 1
            if trace_log is not None:
                trace_log.write(f"{stage} {int(symbols[0])} {float(costs[0]):.10g}\n")
            prefix = prefix + (int(symbols[0]),)
            cost = float(costs[0])
            trace.nodes_expanded += 1
        evaluate_leaf(prefix)

    return trace
