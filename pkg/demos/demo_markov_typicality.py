"""Fit a first-order Markov prior to a pool of good phase sequences and
inspect its information-theoretic footprint: entropy rate, typicality of
samples, and the divergence from the uniform chain.

Run:  python demos/demo_markov_typicality.py
"""

import numpy as np

from risopt.channel import synthesize_channel
from risopt.config import SystemConfig
from risopt.metrics import PhaseObjective, aqnm_alpha
from risopt.priors import (
    entropy_rate,
    estimate_prior,
    is_strongly_typical,
    kl_divergence,
    log_prob,
    sample_candidate_pool,
    uniform_prior,
    weak_typicality_gap,
)
from risopt.transceiver import design_hybrid_combiner, design_hybrid_precoder


def main():
    cfg = SystemConfig(n_ris=8, n_interferers=5, adc_bits=3, snr_db=0.0)
    rng = np.random.default_rng(21)

    chan = synthesize_channel(cfg, rng)
    _, _, _ = design_hybrid_precoder(chan.r_mat, cfg)
    w_a_h, w_d_h, _ = design_hybrid_combiner(chan.p_mat, cfg)
    objective = PhaseObjective(chan, w_a_h, w_d_h, aqnm_alpha(cfg.adc_bits),
                               cfg.noise_var, cfg.alphabet_array)

    k, m = cfg.alphabet_size, cfg.n_ris
    pool = sample_candidate_pool(objective, cfg, budget=k**m, m=16, rng=rng)
    prior = estimate_prior(pool, k, m)

    print("transition matrix learned from the 16 best sequences:")
    print(np.array_str(prior.transition, precision=3, suppress_small=True))

    h = entropy_rate(prior, m)
    print(f"\nsequence entropy: {h:.3f} bits over {m} stages "
          f"({h / m:.3f} bits/stage; uniform chain would be "
          f"{np.log2(k):.3f} bits/stage)")
    print(f"KL divergence from the uniform chain: "
          f"{kl_divergence(prior, uniform_prior(k), m):.3f} bits")

    print("\nsamples from the chain (log2 prob, weak gap, strongly typical @ 0.5):")
    for _ in range(5):
        seq = prior.sample(m, rng)
        strong, dev = is_strongly_typical(seq, prior, delta=0.5)
        print(f"  {seq.phases}  lp={log_prob(seq, prior):7.2f}  "
              f"gap={weak_typicality_gap(seq, prior, m):.3f}  "
              f"strong={strong} (max dev {dev:.2f})")

    best = pool[0]
    print(f"\npool best sequence {best.phases}: "
          f"log2 prob {log_prob(best, prior):.2f} under its own prior")


if __name__ == "__main__":
    main()
