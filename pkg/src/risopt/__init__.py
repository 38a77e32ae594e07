"""Discrete phase optimization for a passive reflecting surface in a
massive-MIMO link with low-resolution ADCs.

The pipeline: synthesize the two-hop channel, design hybrid analog/digital
transceivers, estimate a Markov prior over near-optimal reflector settings,
and search the discrete phase space by information-guided branch-and-prune,
benchmarked against exhaustive enumeration, a trace-maximization heuristic,
and alternating optimization.
"""

from .config import SystemConfig, split_seed, DEFAULT_PHASE_ALPHABET
from .channel import ChannelRealization, steering_vector, synthesize_channel
from .transceiver import (
    TransceiverSet,
    design_hybrid_combiner,
    design_hybrid_precoder,
    default_stream_precoder,
    finalize_digital,
    left_inverse,
    right_inverse,
)
from .metrics import (
    MetricReport,
    PhaseObjective,
    PowerBudget,
    QuantModel,
    aqnm_alpha,
    crlb,
    energy_efficiency,
    info_rate,
    info_rate_from_gain,
    mse_matrix,
    noise_covariance,
    objective_f,
    quant_noise_cov,
)
from .priors import (
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
from .search import PriorPolicy, SearchConfig, SearchTrace, find_best_children, idbp_search, mi_edge_score
from .baselines import alternating_opt, ao_initializer, exhaustive_search, quantize_phases, tmh
from .link import LinkEvaluator, simulate_stream_mse
from .harness import (
    ExperimentSpec,
    ResultRow,
    emit_csv,
    emit_plot_script,
    load_config,
    parse_config,
    run_experiment,
)
from . import errors

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
