"""Command-line front end: `run` executes a configured sweep and writes the
CSV (plus a companion plot script); `verify` runs the acceptance suite.

Exit codes: 0 success, 1 configuration error, 2 verification failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .errors import ConfigError, RisOptError


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="risopt")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a Monte Carlo sweep")
    run.add_argument("--config", required=True, help="key=value configuration file")
    run.add_argument("--out", default=None, help="output CSV path (overrides config)")
    run.add_argument("--seed", type=int, default=None, help="master seed override")
    run.add_argument("--algos", default=None,
                     help="comma-separated subset of es,idbp,tmh,ao1,ao2")
    run.add_argument("--trials", type=int, default=None)
    run.add_argument("--workers", type=int, default=None)

    sub.add_parser("verify", help="run the acceptance suite")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "run":
        from .harness import emit_csv, emit_plot_script, load_config, run_experiment

        try:
            spec = load_config(args.config)
            overrides = {}
            if args.out is not None:
                overrides["output_path"] = args.out
            if args.seed is not None:
                overrides["master_seed"] = args.seed
            if args.algos is not None:
                overrides["algorithms"] = tuple(args.algos.split(","))
            if args.trials is not None:
                overrides["trials"] = args.trials
            if args.workers is not None:
                overrides["workers"] = args.workers
            if overrides:
                spec = replace(spec, **overrides)
        except ConfigError as exc:
            print(f"configuration error: {exc}", file=sys.stderr)
            return 1
        try:
            rows = run_experiment(spec)
        except RisOptError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        emit_csv(rows, spec.output_path)
        emit_plot_script(rows, spec.output_path + ".plot.py")
        errors = [r for r in rows if r.error]
        for r in errors:
            print(f"row ({r.algorithm}, M={r.m}, b={r.b}, snr={r.snr_db}, "
                  f"trial={r.trial}) failed: {r.error}", file=sys.stderr)
        print(f"wrote {len(rows)} rows to {spec.output_path}")
        return 0

    from .acceptance import run_all

    return 0 if run_all() else 2


if __name__ == "__main__":
    raise SystemExit(main())
