"""Comparison algorithms: exhaustive enumeration, the trace-maximization
heuristic, and block-cyclic alternating optimization."""

from __future__ import annotations

import numpy as np

from .channel import ChannelRealization
from .config import SystemConfig
from .errors import EigFailure, SpaceTooLarge
from .link import LinkEvaluator
from .priors import PhaseSequence, enumerate_sequences
from .transceiver import (
    TransceiverSet,
    design_hybrid_combiner,
    design_hybrid_precoder,
    rank_limited_pinv,
)

_ENUM_CHUNK = 1 << 16


def exhaustive_search(leaf_objective, n_symbols: int, n_stages: int,
                      progress_cap: int = 10**7):
    """Evaluate every sequence in lexicographic order and keep the first
    minimizer.

    Uses the objective's batch interface when available; enumeration is
    chunked so memory stays flat.  Returns (PhaseSequence, objective,
    evaluations).
    """
    total = n_symbols**n_stages
    if total > progress_cap:
        raise SpaceTooLarge(
            f"{n_symbols}^{n_stages} = {total} sequences exceeds the cap {progress_cap}")
    batch = getattr(leaf_objective, "batch", None)
    best_val = np.inf
    best_seq = None
    for start in range(0, total, _ENUM_CHUNK):
        rows = enumerate_sequences(n_symbols, n_stages, start, min(start + _ENUM_CHUNK, total))
        if batch is not None:
            values = np.asarray(batch(rows), dtype=float)
        else:
            values = np.array([float(leaf_objective(r)) for r in rows])
        i = int(np.argmin(values))  # np.argmin keeps the first minimum
        if values[i] < best_val:
            best_val = float(values[i])
            best_seq = rows[i].copy()
    return PhaseSequence(best_seq, best_val), best_val, total


def tmh_coupling(chan: ChannelRealization, trx: TransceiverSet) -> np.ndarray:
    """Quadratic coupling of the RIS phase vector in the trace objective:
    ``(R F F^H R^H)^T hadamard (P^H W^H W P)`` with the full precoder
    F = F_A F~_D and combine chain W = W~_D^H W_A^H."""
    f = trx.f_a @ trx.f_d_tilde
    w = trx.w_d_tilde_h @ trx.w_a_h
    left = chan.r_mat @ f
    right = w @ chan.p_mat
    z = (left @ left.conj().T).T * (right.conj().T @ right)
    return 0.5 * (z + z.conj().T)


def _principal_eigvec(z: np.ndarray, tol: float = 1e-10, max_steps: int = 10**4) -> np.ndarray:
    """Power iteration from the first basis vector, phase-anchored so the
    first significant entry is real positive."""
    n = z.shape[0]
    v = np.zeros(n, dtype=complex)
    v[0] = 1.0
    lam = 0.0
    for _ in range(max_steps):
        zv = z @ v
        lam = float((v.conj() @ zv).real)
        if np.linalg.norm(zv - lam * v) <= tol * max(abs(lam), 1.0):
            break
        nrm = np.linalg.norm(zv)
        if nrm == 0.0:
            break  # v is in the null space; any vector is as good as another
        v = zv / nrm
    else:
        raise EigFailure(f"power iteration did not converge in {max_steps} steps")
    anchor = np.flatnonzero(np.abs(v) > 1e-12)
    if anchor.size:
        v = v * np.exp(-1j * np.angle(v[anchor[0]]))
    return v


def quantize_phases(angles: np.ndarray, alphabet: np.ndarray) -> np.ndarray:
    """Nearest alphabet index per angle under circular distance; ties go to
    the lowest index."""
    diff = np.angle(np.exp(1j * (np.asarray(angles)[:, None] - alphabet[None, :])))
    return np.argmin(np.abs(diff), axis=1).astype(np.int64)


def tmh(chan: ChannelRealization, trx: TransceiverSet, cfg: SystemConfig,
        exhaustive: bool = False, progress_cap: int = 10**7) -> PhaseSequence:
    """Trace-maximization baseline.

    Default mode quantizes the principal eigenvector of the coupling matrix;
    ``exhaustive`` instead enumerates the alphabet and maximizes the trace
    quadratic form directly.
    """
    z = tmh_coupling(chan, trx)
    alphabet = cfg.alphabet_array
    if exhaustive:
        def neg_trace(rows):
            u = np.exp(1j * alphabet[np.asarray(rows)])
            return -np.einsum("bi,ij,bj->b", u.conj(), z, u, optimize=True).real

        seq, _, _ = exhaustive_search(_BatchOnly(neg_trace), cfg.alphabet_size,
                                      cfg.n_ris, progress_cap)
        return seq
    v = _principal_eigvec(z)
    return PhaseSequence(quantize_phases(np.angle(v), alphabet))


class _BatchOnly:
    """Adapter exposing a vectorized callable through the batch protocol."""

    def __init__(self, fn):
        self.batch = fn

    def __call__(self, row):
        return self.batch(np.asarray(row)[None, :])[0]


def ao_initializer(chan: ChannelRealization, cfg: SystemConfig, variant: str,
                   rng: np.random.Generator | None = None):
    """Documented starting points for the alternating optimizer.

    "ao1": near-zero phases with the designed (SVD-seeded) hybrid blocks.
    "ao2": seeded random phases with random constant-modulus analog stages
    and least-squares digital stages fitted against them.
    """
    alphabet = cfg.alphabet_array
    if variant == "ao1":
        f_a, f_d, _ = design_hybrid_precoder(chan.r_mat, cfg)
        w_a_h, w_d_h, _ = design_hybrid_combiner(chan.p_mat, cfg)
        indices = quantize_phases(np.zeros(cfg.n_ris), alphabet)
    elif variant == "ao2":
        if rng is None:
            raise ValueError("ao2 initialization needs an rng")
        f_a = np.exp(1j * rng.uniform(0, 2 * np.pi, (cfg.n_tx, cfg.n_rf_tx))) / np.sqrt(cfg.n_tx)
        w_a = np.exp(1j * rng.uniform(0, 2 * np.pi, (cfg.n_rx, cfg.n_rf_rx))) / np.sqrt(cfg.n_rx)
        f_d = np.linalg.lstsq(f_a, rank_limited_pinv(chan.r_mat, cfg.n_rf_tx), rcond=None)[0]
        f_d *= np.sqrt(cfg.n_streams) / np.linalg.norm(f_a @ f_d)
        w_d_h = (np.linalg.lstsq(w_a.conj(), rank_limited_pinv(chan.p_mat, cfg.n_rf_rx).T, rcond=None)[0]).T
        w_d_h *= np.sqrt(cfg.n_streams) / np.linalg.norm(w_d_h @ w_a.conj().T)
        w_a_h = w_a.conj().T
        indices = rng.integers(0, cfg.alphabet_size, cfg.n_ris)
    else:
        raise ValueError(f"unknown initialization variant {variant!r}")
    trx = TransceiverSet(f_a=f_a, f_d_tilde=np.asarray(f_d), w_a_h=np.asarray(w_a_h),
                         w_d_tilde_h=np.asarray(w_d_h))
    return trx, PhaseSequence(np.asarray(indices, dtype=np.int64))


def alternating_opt(chan: ChannelRealization, cfg: SystemConfig,
                    init: tuple[TransceiverSet, PhaseSequence],
                    eps_t: float = 1e-6, max_rounds: int = 50):
    """Block-cyclic minimization of the composed error trace.

    Rounds update, in order: hybrid precoder, hybrid combiner, each
    reflector element by greedy alphabet sweep, then the stream-stage
    blocks.  Every block update is guarded — a candidate that fails to
    improve the objective is discarded — so the recorded history is
    non-increasing by construction.  Returns (TransceiverSet, PhaseSequence,
    mse_history).
    """
    trx, seq = init
    alphabet = cfg.alphabet_array
    indices = np.asarray(seq.phases, dtype=np.int64).copy()
    f_s = trx.f_s
    w_s = trx.w_s

    def make_eval(t):
        return LinkEvaluator(chan, t, cfg)

    ev = make_eval(trx)
    if w_s is None:
        f_s, w_s = ev.finalize(alphabet[indices], f_s)

    def loss(evaluator, idx, fs, ws):
        return evaluator.composed_mse(alphabet[idx], fs, ws)

    current = loss(ev, indices, f_s, w_s)
    history = [current]
    # The hybrid refit targets depend only on the channel factors, so the
    # fitted blocks are computed once and offered to the guard each round.
    f_a_fit, f_d_fit, _ = design_hybrid_precoder(chan.r_mat, cfg)
    w_a_fit, w_d_fit, _ = design_hybrid_combiner(chan.p_mat, cfg)
    for _ in range(max_rounds):
        # Hybrid precoder refit.
        cand = TransceiverSet(f_a=f_a_fit, f_d_tilde=f_d_fit, w_a_h=trx.w_a_h,
                              w_d_tilde_h=trx.w_d_tilde_h)
        cand_ev = make_eval(cand)
        val = loss(cand_ev, indices, f_s, w_s)
        if val <= current:
            trx, ev, current = cand, cand_ev, val

        # Hybrid combiner refit.
        cand = TransceiverSet(f_a=trx.f_a, f_d_tilde=trx.f_d_tilde,
                              w_a_h=w_a_fit, w_d_tilde_h=w_d_fit)
        cand_ev = make_eval(cand)
        val = loss(cand_ev, indices, f_s, w_s)
        if val <= current:
            trx, ev, current = cand, cand_ev, val

        # Greedy per-element phase sweep.
        for m in range(cfg.n_ris):
            base = indices[m]
            best_k, best_val = base, current
            for k in range(cfg.alphabet_size):
                if k == base:
                    continue
                indices[m] = k
                val = loss(ev, indices, f_s, w_s)
                if val < best_val:
                    best_k, best_val = k, val
            indices[m] = best_k
            current = best_val

        # Stream-stage refit.
        fs_cand, ws_cand = ev.finalize(alphabet[indices])
        val = loss(ev, indices, fs_cand, ws_cand)
        if val <= current:
            f_s, w_s, current = fs_cand, ws_cand, val

        improvement = history[-1] - current
        history.append(current)
        if improvement <= eps_t:
            break

    out = TransceiverSet(f_a=trx.f_a, f_d_tilde=trx.f_d_tilde, w_a_h=trx.w_a_h,
                         w_d_tilde_h=trx.w_d_tilde_h, f_s=f_s, w_s=w_s,
                         precoder_scale=trx.precoder_scale,
                         combiner_scale=trx.combiner_scale)
    return out, PhaseSequence(indices, current), history
