"""Seeded Monte Carlo sweeps over SNR / ADC bits / reflector size, algorithm
dispatch, CSV emission, and plot-script generation.

Reproducibility contract: every random draw is keyed by a stable hash of the
master seed and the grid coordinates, so permuting grid order, restricting
the grid, or distributing trials over workers never changes a row's numeric
content.  The channel draw is keyed only by (reflector size, trial): the
physical channel does not depend on the ADC resolution or the noise level,
and sharing it across those axes is also what makes exhaustive enumeration
affordable (the per-sequence quantizer diagonals are reused across the
whole bits/SNR grid).
"""

from __future__ import annotations

import concurrent.futures
import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import baselines
from .channel import synthesize_channel
from .config import SystemConfig, split_seed
from .errors import ConfigError, RisOptError
from .link import LinkEvaluator
from .metrics import PhaseObjective, PowerBudget, aqnm_alpha
from .priors import PhaseSequence, enumerate_sequences, estimate_prior
from .search import SearchConfig, idbp_search
from .transceiver import design_hybrid_combiner, design_hybrid_precoder, TransceiverSet

KNOWN_ALGORITHMS = ("es", "idbp", "tmh", "ao1", "ao2")
CSV_HEADER = "algorithm,M,K,b,snr_db,trial,mse,rate_bits,energy_eff,objective,leaf_evals,wall_time_ms,seed"
DEFAULT_SNR_GRID = tuple(range(-30, 31, 5))
DEFAULT_BITS_GRID = (2, 3, 4)
ES_SPACE_CAP = 10**7


@dataclass(frozen=True)
class ExperimentSpec:
    """Everything one sweep needs, grids plus plumbing."""

    base: SystemConfig
    snr_grid_db: tuple = DEFAULT_SNR_GRID
    bits_grid: tuple = DEFAULT_BITS_GRID
    m_grid: tuple = (12,)
    algorithms: tuple = ("idbp",)
    trials: int = 1
    output_path: str = "results.csv"
    master_seed: int = 0
    pool_budget: int = 2000
    pool_m: int = 16
    search: SearchConfig = field(default_factory=SearchConfig)
    workers: int = 1
    power: PowerBudget = field(default_factory=PowerBudget)

    def __post_init__(self):
        if not self.snr_grid_db or not self.bits_grid or not self.m_grid:
            raise ConfigError("grids must be nonempty")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        unknown = set(self.algorithms) - set(KNOWN_ALGORITHMS)
        if unknown or not self.algorithms:
            raise ConfigError(f"algorithms must be a nonempty subset of {KNOWN_ALGORITHMS}")
        if "es" in self.algorithms:
            k = self.base.alphabet_size
            for m in self.m_grid:
                if k**m > ES_SPACE_CAP:
                    raise ConfigError(
                        f"exhaustive search refused: {k}^{m} > {ES_SPACE_CAP}")


@dataclass
class ResultRow:
    algorithm: str
    m: int
    k: int
    b: int
    snr_db: float
    trial: int
    mse: float
    rate_bits: float
    energy_eff: float
    objective: float
    leaf_evals: int
    wall_time_ms: float
    seed: int
    error: str | None = None


def _cfg_for(spec: ExperimentSpec, m: int, b: int, snr_db: float) -> SystemConfig:
    # Small reflectors cannot host the full interferer population.
    n_intf = min(spec.base.n_interferers, m - 2)
    return replace(spec.base, n_ris=m, n_interferers=n_intf, adc_bits=b,
                   snr_db=snr_db, noise_var=None)


def _run_cell(spec: ExperimentSpec, m: int, trial: int) -> list:
    """All rows for one (reflector size, trial) coordinate."""
    rows = []
    chan_seed = split_seed(spec.master_seed, "chan", m, trial)
    cfg0 = _cfg_for(spec, m, spec.bits_grid[0], spec.snr_grid_db[0])
    chan = synthesize_channel(cfg0, np.random.default_rng(chan_seed))
    f_a, f_d, _ = design_hybrid_precoder(chan.r_mat, cfg0)
    w_a_h, w_d_h, _ = design_hybrid_combiner(chan.p_mat, cfg0)
    trx = TransceiverSet(f_a=f_a, f_d_tilde=f_d, w_a_h=w_a_h, w_d_tilde_h=w_d_h)
    alphabet = cfg0.alphabet_array
    k = cfg0.alphabet_size
    n_grid = len(spec.bits_grid) * len(spec.snr_grid_db)

    # Quantizer diagonals are channel/combiner properties only; computing
    # them once per trial is the dominant shared cost for es and idbp.
    base_eval = PhaseObjective(chan, trx.w_a_h, trx.w_d_tilde_h,
                               aqnm_alpha(cfg0.adc_bits), cfg0.noise_var, alphabet)
    d_all = d_all_ms = None
    if "es" in spec.algorithms:
        t0 = time.perf_counter()
        parts = [base_eval.quant_diag_batch(enumerate_sequences(k, m, s, min(s + (1 << 16), k**m)))
                 for s in range(0, k**m, 1 << 16)]
        d_all = np.concatenate(parts, axis=0)
        d_all_ms = (time.perf_counter() - t0) * 1e3
    d_pool = pool_rows = pool_ms = None
    if "idbp" in spec.algorithms:
        t0 = time.perf_counter()
        pool_rng = np.random.default_rng(split_seed(spec.master_seed, "pool", m, trial))
        if k**m <= spec.pool_budget:
            pool_rows = enumerate_sequences(k, m)
        else:
            pool_rows = pool_rng.integers(0, k, size=(spec.pool_budget, m), dtype=np.int64)
        d_pool = base_eval.quant_diag_batch(pool_rows)
        pool_ms = (time.perf_counter() - t0) * 1e3

    for b in spec.bits_grid:
        for snr_db in spec.snr_grid_db:
            cfg = _cfg_for(spec, m, b, snr_db)
            evaluator = PhaseObjective(chan, trx.w_a_h, trx.w_d_tilde_h,
                                       aqnm_alpha(b), cfg.noise_var, alphabet)
            linkev = LinkEvaluator(chan, trx, cfg)
            row_seed = split_seed(spec.master_seed, "trial", m, b, snr_db, trial)
            for algo in spec.algorithms:
                row = ResultRow(algorithm=algo, m=m, k=k, b=b, snr_db=snr_db,
                                trial=trial, mse=np.nan, rate_bits=np.nan,
                                energy_eff=np.nan, objective=np.nan,
                                leaf_evals=0, wall_time_ms=np.nan, seed=row_seed)
                try:
                    t0 = time.perf_counter()
                    seq, extra_ms = _dispatch(algo, spec, cfg, chan, trx, evaluator,
                                              linkev, d_all, d_pool, pool_rows,
                                              d_all_ms, pool_ms, n_grid, row_seed, row)
                    row.wall_time_ms = (time.perf_counter() - t0) * 1e3 + extra_ms
                    report = linkev.design_report(alphabet[seq.phases], spec.power,
                                                  objective=row.objective)
                    row.mse = report.mse
                    row.rate_bits = report.rate_bits
                    row.energy_eff = report.energy_eff
                except RisOptError as exc:
                    row.error = f"{type(exc).__name__}: {exc}"
                rows.append(row)
    return rows


def _dispatch(algo, spec, cfg, chan, trx, evaluator, linkev, d_all, d_pool,
              pool_rows, d_all_ms, pool_ms, n_grid, row_seed, row):
    """Run one algorithm; fills objective/leaf_evals on the row and returns
    (sequence, amortized extra milliseconds)."""
    if algo == "es":
        values = evaluator.values_from_quant_diag(d_all)
        i = int(np.argmin(values))
        seq = PhaseSequence(enumerate_sequences(cfg.alphabet_size, cfg.n_ris,
                                                i, i + 1)[0], float(values[i]))
        row.objective = float(values[i])
        row.leaf_evals = len(values)
        return seq, d_all_ms / n_grid
    if algo == "idbp":
        values = evaluator.values_from_quant_diag(d_pool)
        order = np.argsort(values, kind="stable")[: spec.pool_m]
        pool = [PhaseSequence(pool_rows[i], float(values[i])) for i in order]
        prior = estimate_prior(pool, cfg.alphabet_size, cfg.n_ris)
        trace = idbp_search(cfg, spec.search, prior, evaluator)
        row.objective = trace.best_objective
        row.leaf_evals = trace.leaf_evaluations
        return trace.best_sequence, pool_ms / n_grid
    if algo == "tmh":
        seq = baselines.tmh(chan, trx, cfg)
        row.objective = float(evaluator(seq.phases))
        return seq, 0.0
    if algo in ("ao1", "ao2"):
        rng = np.random.default_rng(split_seed(spec.master_seed, algo, row_seed))
        init = baselines.ao_initializer(chan, cfg, algo, rng)
        _, seq, _history = baselines.alternating_opt(chan, cfg, init)
        row.objective = float(evaluator(seq.phases))
        return seq, 0.0
    raise ConfigError(f"unknown algorithm {algo!r}")


def run_experiment(spec: ExperimentSpec) -> list:
    cells = [(m, t) for m in spec.m_grid for t in range(spec.trials)]
    if spec.workers > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=spec.workers) as pool:
            chunks = list(pool.map(_run_cell, [spec] * len(cells),
                                   [m for m, _ in cells], [t for _, t in cells]))
    else:
        chunks = [_run_cell(spec, m, t) for m, t in cells]
    rows = [row for chunk in chunks for row in chunk]
    rows.sort(key=lambda r: (r.algorithm, r.m, r.b, r.snr_db, r.trial))
    return rows


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.10g}"
    return str(x)


def emit_csv(rows, path) -> None:
    lines = [CSV_HEADER]
    ordered = sorted(rows, key=lambda r: (r.algorithm, r.m, r.b, r.snr_db, r.trial))
    for r in ordered:
        lines.append(",".join(_fmt(v) for v in (
            r.algorithm, r.m, r.k, r.b, r.snr_db, r.trial, r.mse, r.rate_bits,
            r.energy_eff, r.objective, r.leaf_evals, r.wall_time_ms, r.seed)))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def emit_plot_script(rows, path) -> None:
    """Self-contained script drawing MSE-vs-SNR and rate-vs-SNR, one series
    per (algorithm, bits) pair, trial-averaged."""
    acc: dict = {}
    for r in sorted(rows, key=lambda r: (r.algorithm, r.b, r.snr_db)):
        if r.error is None and np.isfinite(r.mse):
            acc.setdefault((r.algorithm, r.b), {}).setdefault(r.snr_db, []).append(
                (r.mse, r.rate_bits))
    series = []
    for (algo, b), per_snr in sorted(acc.items()):
        snrs = sorted(per_snr)
        mse = [float(np.mean([v[0] for v in per_snr[s]])) for s in snrs]
        rate = [float(np.mean([v[1] for v in per_snr[s]])) for s in snrs]
        series.append((f"{algo} b={b}", snrs, mse, rate))
    body = [
        "#!/usr/bin/env python",
        '"""Auto-generated: trial-averaged MSE and rate versus SNR."""',
        "import matplotlib.pyplot as plt",
        "",
        f"series = {series!r}",
        "",
        "fig, (ax_mse, ax_rate) = plt.subplots(1, 2, figsize=(11, 4))",
        "for label, snr, mse, rate in series:",
        "    ax_mse.semilogy(snr, mse, marker='o', label=label)",
        "    ax_rate.plot(snr, rate, marker='s', label=label)",
        "ax_mse.set_xlabel('SNR [dB]'); ax_mse.set_ylabel('MSE')",
        "ax_rate.set_xlabel('SNR [dB]'); ax_rate.set_ylabel('rate [bits/s/Hz]')",
        "for ax in (ax_mse, ax_rate):",
        "    ax.grid(True, which='both', alpha=0.3)",
        "    if series:",
        "        ax.legend()",
        "fig.tight_layout()",
        "plt.show()",
    ]
    with open(path, "w") as fh:
        fh.write("\n".join(body) + "\n")


# --- configuration files ---------------------------------------------------

_LIST_KEYS = {"snr_grid_db", "bits_grid", "m_grid", "algorithms", "phase_alphabet"}
_INT_KEYS = {"n_tx", "n_rx", "n_rf_tx", "n_rf_rx", "n_streams", "n_interferers",
             "trials", "seed", "pool_budget", "pool_m", "workers", "k_best",
             "max_leaf_evals"}
_FLOAT_KEYS = {"symbol_power"}
_BOOL_KEYS = {"recursive_second_pass"}


def parse_config(text: str) -> ExperimentSpec:
    """key=value format, one pair per line, '#' comments, commas for lists."""
    kv = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected key=value, got {raw!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        kv[key] = val

    def pop_list(key, conv):
        return tuple(conv(v.strip()) for v in kv.pop(key).split(",")) if key in kv else None

    base_kw = {}
    for key in ("n_tx", "n_rx", "n_rf_tx", "n_rf_rx", "n_streams", "n_interferers"):
        if key in kv:
            base_kw[key] = int(kv.pop(key))
    if "symbol_power" in kv:
        base_kw["symbol_power"] = float(kv.pop("symbol_power"))
    alphabet = pop_list("phase_alphabet", float)
    if alphabet is not None:
        base_kw["phase_alphabet"] = alphabet

    spec_kw = {}
    for key, conv in (("snr_grid_db", float), ("bits_grid", int), ("m_grid", int),
                      ("algorithms", str)):
        got = pop_list(key, conv)
        if got is not None:
            spec_kw[key] = got
    for key, attr in (("trials", "trials"), ("seed", "master_seed"),
                      ("pool_budget", "pool_budget"), ("pool_m", "pool_m"),
                      ("workers", "workers")):
        if key in kv:
            spec_kw[attr] = int(kv.pop(key))
    if "output" in kv:
        spec_kw["output_path"] = kv.pop("output")
    search_kw = {}
    if "k_best" in kv:
        search_kw["k_best"] = int(kv.pop("k_best"))
    if "max_leaf_evals" in kv:
        search_kw["max_leaf_evals"] = int(kv.pop("max_leaf_evals"))
    if "recursive_second_pass" in kv:
        search_kw["recursive_second_pass"] = kv.pop("recursive_second_pass").lower() in (
            "1", "true", "yes")
    if kv:
        raise ConfigError(f"unknown configuration keys: {sorted(kv)}")
    try:
        n_ris = max(spec_kw.get("m_grid", (12,)))
        # Same clamp the per-cell configs apply: small reflectors cannot
        # host the full interferer population.
        if "n_interferers" in base_kw:
            base_kw["n_interferers"] = min(base_kw["n_interferers"], n_ris - 2)
        base = SystemConfig(n_ris=n_ris, **base_kw)
        if search_kw:
            spec_kw["search"] = SearchConfig(**search_kw)
        return ExperimentSpec(base=base, **spec_kw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: str) -> ExperimentSpec:
    try:
        with open(path) as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read configuration {path!r}: {exc}") from exc
