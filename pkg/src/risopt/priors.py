"""First-order Markov statistics of near-optimal phase sequences.

A pool of good solutions is condensed into an initial distribution and a
K x K transition matrix.  Everything downstream (entropy rate, typicality
tests, KL divergence, the tree-search branching scores) reads these two
tables.  Counts are tallied the obvious way and then row-normalized so the
conditionals are proper distributions; the raw count matrix is kept for
auditing against the joint-style ``counts / (m*M)`` normalization.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyPool, AlphabetViolation

DEFAULT_EPSILON_FLOOR = 1e-6


@dataclass
class PhaseSequence:
    """A length-M assignment of alphabet indices, optionally with its
    objective value."""

    phases: np.ndarray
    objective_value: float | None = None

    def __post_init__(self):
        self.phases = np.asarray(self.phases, dtype=np.int64)

    def __len__(self) -> int:
        return len(self.phases)

    def validate(self, n_symbols: int) -> None:
        if self.phases.min(initial=0) < 0 or self.phases.max(initial=0) >= n_symbols:
            raise AlphabetViolation("sequence index outside the phase alphabet")


@dataclass
class ConditionalPrior:
    """Initial distribution plus row-stochastic transition matrix.

    ``transition[j, i]`` is the probability of symbol i following symbol j.
    All entries are floored at ``epsilon_floor`` (probability mass mixed
    toward uniform) so log-probabilities stay finite.
    """

    initial: np.ndarray
    transition: np.ndarray
    epsilon_floor: float = DEFAULT_EPSILON_FLOOR
    raw_counts: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        self.initial = np.asarray(self.initial, dtype=float)
        self.transition = np.asarray(self.transition, dtype=float)
        k = len(self.initial)
        if self.transition.shape != (k, k):
            raise ValueError("transition must be K x K")
        if not np.allclose(self.initial.sum(), 1.0, atol=1e-12):
            raise ValueError("initial distribution must sum to 1")
        if not np.allclose(self.transition.sum(axis=1), 1.0, atol=1e-12):
            raise ValueError("transition rows must sum to 1")
        if (self.initial < 0).any() or (self.transition < 0).any():
            raise ValueError("probabilities must be nonnegative")

    @property
    def n_symbols(self) -> int:
        return len(self.initial)

    def stage_marginals(self, n_stages: int) -> np.ndarray:
        """Marginal distribution at each stage, propagated from the initial."""
        out = np.empty((n_stages, self.n_symbols))
        out[0] = self.initial
        for t in range(1, n_stages):
            out[t] = out[t - 1] @ self.transition
        return out

    def sample(self, n_stages: int, rng: np.random.Generator) -> PhaseSequence:
        """Draw one sequence from the chain."""
        seq = np.empty(n_stages, dtype=np.int64)
        seq[0] = rng.choice(self.n_symbols, p=self.initial)
        for t in range(1, n_stages):
            seq[t] = rng.choice(self.n_symbols, p=self.transition[seq[t - 1]])
        return PhaseSequence(seq)

    def to_text(self) -> str:
        """Row-major plain-text form: initial on the first line, then one
        transition row per line."""
        lines = [" ".join(f"{v:.17g}" for v in self.initial)]
        for row in self.transition:
            lines.append(" ".join(f"{v:.17g}" for v in row))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, epsilon_floor: float = DEFAULT_EPSILON_FLOOR):
        rows = [np.array([float(v) for v in line.split()]) for line in text.strip().splitlines()]
        return cls(initial=rows[0], transition=np.vstack(rows[1:]), epsilon_floor=epsilon_floor)


def uniform_prior(n_symbols: int, epsilon_floor: float = DEFAULT_EPSILON_FLOOR) -> ConditionalPrior:
    k = n_symbols
    return ConditionalPrior(
        initial=np.full(k, 1.0 / k), transition=np.full((k, k), 1.0 / k),
        epsilon_floor=epsilon_floor,
    )


def _floor_mix(dist: np.ndarray, floor: float) -> np.ndarray:
    """Mix toward uniform just enough that every entry is >= floor."""
    k = dist.shape[-1]
    if floor <= 0:
        return dist
    return dist * (1.0 - k * floor) + floor


def enumerate_sequences(n_symbols: int, length: int, start: int = 0, stop: int | None = None) -> np.ndarray:
    """Lexicographic block of all index sequences, most-significant first."""
    total = n_symbols**length
    stop = total if stop is None else stop
    flat = np.arange(start, stop)
    return np.stack(np.unravel_index(flat, (n_symbols,) * length), axis=1).astype(np.int64)


def sample_candidate_pool(objective, cfg, budget: int, m: int, rng: np.random.Generator):
    """Collect the m best-scoring sequences found within a sampling budget.

    When the whole space fits inside the budget it is enumerated and the true
    m best are returned; otherwise ``budget`` uniform random sequences are
    scored and the m best among them kept.  Always sorted ascending by
    objective (ties resolved by discovery order).
    """
    k, n_stages = cfg.alphabet_size, cfg.n_ris
    if not 1 <= m <= budget:
        raise EmptyPool(f"need 1 <= m <= budget, got m={m}, budget={budget}")
    if k**n_stages <= budget:
        candidates = enumerate_sequences(k, n_stages)
    else:
        candidates = rng.integers(0, k, size=(budget, n_stages), dtype=np.int64)
    if hasattr(objective, "batch"):
        values = np.asarray(objective.batch(candidates), dtype=float)
    else:
        values = np.array([float(objective(row)) for row in candidates])
    order = np.argsort(values, kind="stable")[: min(m, len(candidates))]
    return [PhaseSequence(candidates[i], float(values[i])) for i in order]


def estimate_prior(pool, n_symbols: int, n_stages: int,
                   epsilon_floor: float = DEFAULT_EPSILON_FLOOR) -> ConditionalPrior:
    """Tally consecutive-pair counts over the pool and normalize.

    Rows of the transition matrix are the per-parent conditional frequencies;
    parents never seen fall back to uniform.  The raw count matrix is kept so
    the joint-style ``counts / (m*M)`` view stays recoverable.
    """
    if not pool:
        raise EmptyPool("cannot estimate a prior from an empty pool")
    k = n_symbols
    counts = np.zeros((k, k))
    first = np.zeros(k)
    for seq in pool:
        idx = np.asarray(seq.phases, dtype=np.int64)
        if len(idx) != n_stages:
            raise EmptyPool(f"pool sequence length {len(idx)} != {n_stages}")
        first[idx[0]] += 1
        np.add.at(counts, (idx[:-1], idx[1:]), 1.0)

    initial = first / first.sum()
    row_tot = counts.sum(axis=1, keepdims=True)
    transition = np.where(row_tot > 0, counts / np.where(row_tot > 0, row_tot, 1.0), 1.0 / k)
    return ConditionalPrior(
        initial=_floor_mix(initial, epsilon_floor),
        transition=_floor_mix(transition, epsilon_floor),
        epsilon_floor=epsilon_floor,
        raw_counts=counts,
    )


def entropy_rate(prior: ConditionalPrior, n_stages: int) -> float:
    """Total sequence entropy in bits: initial entropy plus the propagated
    per-stage conditional entropies."""
    def h(dist):
        d = dist[dist > 0]
        return float(-(d * np.log2(d)).sum())

    total = h(prior.initial)
    if n_stages > 1:
        row_h = np.array([h(row) for row in prior.transition])
        marg = prior.stage_marginals(n_stages - 1)
        total += float((marg @ row_h).sum())
    return total


def log_prob(seq: PhaseSequence, prior: ConditionalPrior) -> float:
    """log2 probability of a sequence under the chain."""
    idx = np.asarray(seq.phases, dtype=np.int64)
    total = float(np.log2(prior.initial[idx[0]]))
    if len(idx) > 1:
        total += float(np.log2(prior.transition[idx[:-1], idx[1:]]).sum())
    return total


@dataclass(frozen=True)
class EmpiricalConditional:
    """Transition statistics of a single sequence under both normalizations."""

    counts: np.ndarray
    joint: np.ndarray          # counts / (M - 1)
    conditional: np.ndarray    # counts row-normalized by parent visits
    initial_indicator: np.ndarray
    parent_visits: np.ndarray


def empirical_conditional(seq: PhaseSequence, n_symbols: int) -> EmpiricalConditional:
    """Count the j -> i transitions of one sequence.

    Entry (j, i) of ``joint`` divides by the transition count M-1; the
    ``conditional`` view divides each row by that parent's visit count.
    """
    idx = np.asarray(seq.phases, dtype=np.int64)
    k = n_symbols
    counts = np.zeros((k, k))
    if len(idx) > 1:
        np.add.at(counts, (idx[:-1], idx[1:]), 1.0)
    visits = counts.sum(axis=1)
    joint = counts / max(len(idx) - 1, 1)
    conditional = np.where(visits[:, None] > 0, counts / np.where(visits[:, None] > 0, visits[:, None], 1.0), 0.0)
    init = np.zeros(k)
    init[idx[0]] = 1.0
    return EmpiricalConditional(counts=counts, joint=joint, conditional=conditional,
                                initial_indicator=init, parent_visits=visits)


def is_strongly_typical(seq: PhaseSequence, prior: ConditionalPrior, delta: float):
    """Relative closeness of the sequence's transition statistics to the prior.

    Every pair (i, j) with prior conditional above the smoothing floor and a
    visited parent must satisfy ``|q_hat(i|j) - q(i|j)| <= delta * q(i|j)``;
    the first symbol's surprisal must sit within delta of the initial-state
    entropy.  Returns (passes, max relative deviation over tested pairs).
    """
    emp = empirical_conditional(seq, prior.n_symbols)
    tested = (prior.transition > prior.epsilon_floor) & (emp.parent_visits[:, None] > 0)
    dev = np.zeros_like(prior.transition)
    dev[tested] = np.abs(emp.conditional[tested] - prior.transition[tested]) / prior.transition[tested]
    max_dev = float(dev.max(initial=0.0))

    init = prior.initial
    h1 = float(-(init[init > 0] * np.log2(init[init > 0])).sum())
    surprisal = -float(np.log2(init[seq.phases[0]]))
    init_ok = abs(surprisal - h1) <= delta * h1 + 1e-12
    return bool(max_dev <= delta and init_ok), max_dev


def weak_typicality_gap(seq: PhaseSequence, prior: ConditionalPrior, n_stages: int) -> float:
    """Distance between the per-symbol surprisal of the sequence and the
    per-symbol entropy rate of the prior."""
    return abs(-log_prob(seq, prior) / n_stages - entropy_rate(prior, n_stages) / n_stages)


def kl_divergence(p_prior: ConditionalPrior, q_prior: ConditionalPrior, n_stages: int) -> float:
    """Sequence-level KL divergence between two homogeneous chains, in bits.

    Chain rule: initial-term divergence plus, at each stage, the p-chain
    stage marginal weighting the per-row divergences.
    """
    def d_kl(p, q):
        mask = p > 0
        return float((p[mask] * np.log2(p[mask] / q[mask])).sum())

    total = d_kl(p_prior.initial, q_prior.initial)
    if n_stages > 1:
        row_d = np.array([
            d_kl(p_prior.transition[j], q_prior.transition[j])
            for j in range(p_prior.n_symbols)
        ])
        marg = p_prior.stage_marginals(n_stages - 1)
        total += float((marg @ row_d).sum())
    return total
