"""Run a small seeded Monte Carlo sweep through the benchmark harness and
print the trial-averaged MSE ordering per SNR point.  The same sweep is
available from the command line:

    risopt run --config <file>

Run:  python demos/demo_snr_sweep.py
"""

import numpy as np

from risopt.config import SystemConfig
from risopt.harness import ExperimentSpec, emit_csv, run_experiment


def main():
    # The stream count must not exceed the channel's path count
    # (n_interferers + 2), or the link cannot carry the streams.
    base = SystemConfig(n_tx=24, n_rx=24, n_rf_tx=4, n_rf_rx=4, n_streams=4,
                        n_ris=8, n_interferers=5, adc_bits=3)
    spec = ExperimentSpec(
        base=base,
        snr_grid_db=tuple(range(-20, 21, 10)),
        bits_grid=(3,),
        m_grid=(8,),
        algorithms=("es", "idbp", "tmh", "ao1"),
        trials=5,
        master_seed=2024,
        output_path="sweep_demo.csv",
    )
    rows = run_experiment(spec)
    emit_csv(rows, spec.output_path)
    print(f"wrote {len(rows)} rows to {spec.output_path}\n")

    means = {}
    for r in rows:
        means.setdefault(r.snr_db, {}).setdefault(r.algorithm, []).append(r.mse)
    algos = spec.algorithms
    header = "snr_db " + " ".join(f"{a:>12}" for a in algos)
    print("trial-averaged MSE:")
    print(header)
    for snr in sorted(means):
        cells = " ".join(f"{np.mean(means[snr][a]):12.5g}" for a in algos)
        print(f"{snr:6.0f} {cells}")

    wall = {a: sum(r.wall_time_ms for r in rows if r.algorithm == a) for a in algos}
    print("\ntotal wall time per algorithm [ms]: "
          + ", ".join(f"{a}={wall[a]:.0f}" for a in algos))


if __name__ == "__main__":
    main()
