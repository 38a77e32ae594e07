"""Hybrid analog/digital precoder and combiner design.

The analog stages are constant-modulus (phase-shifter) matrices; the partial
digital stages are free.  Both sides are fitted to the pseudo-inverse of their
channel factor by alternating least squares with phase projection, so that
``R @ F_A @ Fd ~ I`` and ``Wd @ W_A @ P ~ I`` hold as well as the RF-chain
budget allows.  The digital factor is rescaled at the end to meet the transmit
power constraint; the scale is kept so downstream gain compensation stays
exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import SystemConfig
from .errors import DimensionMismatch, RankDeficient

DEFAULT_TOL = 1e-12


@dataclass
class TransceiverSet:
    """Designed precoder/combiner blocks for one channel realization.

    f_a : (n_tx, n_rf_tx) analog precoder, entries of modulus 1/sqrt(n_tx)
    f_d_tilde : (n_rf_tx, n_ris) partial digital precoder (power-scaled)
    f_s : (n_ris, n_streams) stream-mapping precoder, orthonormal columns
    w_a_h : (n_rf_rx, n_rx) analog combiner, entries of modulus 1/sqrt(n_rx)
    w_d_tilde_h : (n_ris, n_rf_rx) partial digital combiner
    w_s : (n_streams, n_ris) stream-recovery combiner
    precoder_scale / combiner_scale : factors applied to meet the Frobenius
        power constraint; divide them back out to recover the raw
        pseudo-inverse fits.
    """

    f_a: np.ndarray
    f_d_tilde: np.ndarray
    w_a_h: np.ndarray
    w_d_tilde_h: np.ndarray
    f_s: np.ndarray | None = None
    w_s: np.ndarray | None = None
    precoder_scale: float = 1.0
    combiner_scale: float = 1.0
    precoder_residual: float = 0.0
    combiner_residual: float = 0.0


def _pinv_with_rank(mat: np.ndarray, tol: float, need_rank: int) -> np.ndarray:
    u, s, vh = np.linalg.svd(mat, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        raise RankDeficient("zero matrix has no one-sided inverse")
    keep = s > tol * s[0]
    if np.count_nonzero(keep) < need_rank:
        raise RankDeficient(
            f"rank {np.count_nonzero(keep)} below required {need_rank} at tol {tol}"
        )
    inv_s = np.where(keep, 1.0 / np.where(keep, s, 1.0), 0.0)
    return (vh.conj().T * inv_s) @ u.conj().T


def right_inverse(mat: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Right inverse of a full-row-rank matrix: ``mat @ result = I``.

    Raises RankDeficient when fewer than ``mat.shape[0]`` singular values
    exceed ``tol * sigma_max``.
    """
    return _pinv_with_rank(mat, tol, mat.shape[0])


def left_inverse(mat: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Left inverse of a full-column-rank matrix: ``result @ mat = I``."""
    return _pinv_with_rank(mat, tol, mat.shape[1])


def _phase_project(mat: np.ndarray, modulus: float) -> np.ndarray:
    """Nearest constant-modulus matrix: keep phases, fix entry magnitude."""
    return modulus * np.exp(1j * np.angle(mat))


def _altmin_factor(target: np.ndarray, n_inner: int, max_iters: int, tol: float):
    """Fit ``target ~ A @ D`` with A constant-modulus (n_rows x n_inner).

    Alternates an exact least-squares solve for D with a phase projection of
    the unconstrained optimum for A.  A projected step is only accepted while
    it improves the residual, which keeps the iterate history monotone.
    Returns (A, D, residual, history).
    """
    n_rows = target.shape[0]
    modulus = 1.0 / np.sqrt(n_rows)

    # Initialize analog phases from the target's dominant left singular basis.
    u, _, _ = np.linalg.svd(target, full_matrices=True)
    a = _phase_project(u[:, :n_inner], modulus)

    d, *_ = np.linalg.lstsq(a, target, rcond=None)
    residual = float(np.linalg.norm(target - a @ d))
    history = [residual]
    for _ in range(max_iters):
        unconstrained = target @ np.linalg.pinv(d)
        a_new = _phase_project(unconstrained, modulus)
        d_new, *_ = np.linalg.lstsq(a_new, target, rcond=None)
        res_new = float(np.linalg.norm(target - a_new @ d_new))
        if res_new > residual:
            break
        improved = residual - res_new
        a, d, residual = a_new, d_new, res_new
        history.append(residual)
        if improved < tol * max(residual, 1.0):
            break
    return a, d, residual, history


def rank_limited_pinv(mat: np.ndarray, max_rank: int) -> np.ndarray:
    """Pseudo-inverse restricted to the ``max_rank`` strongest modes.

    A hybrid stage with ``max_rank`` RF chains can only realize a rank-
    ``max_rank`` map; inverting the strongest channel modes (rather than the
    full pseudo-inverse, whose dominant directions invert the weakest modes)
    keeps the fitted factors and the composed link well conditioned.
    """
    u, s, vh = np.linalg.svd(mat, full_matrices=False)
    r = min(max_rank, int(np.sum(s > DEFAULT_TOL * s[0])))
    return (vh[:r].conj().T / s[:r]) @ u[:, :r].conj().T


def design_hybrid_precoder(
    r_mat: np.ndarray,
    cfg: SystemConfig,
    max_iters: int = 50,
    tol: float = 1e-10,
    return_history: bool = False,
):
    """Design (f_a, f_d_tilde) so that ``f_a @ f_d_tilde`` tracks the rank-limited pseudo-inverse of r_mat.

    The fitted digital factor is rescaled so ``||f_a @ f_d_tilde||_F**2``
    equals the stream count; the reported residual is the pre-scale fit
    quality.  Returns (f_a, f_d_tilde, residual[, history, scale]).
    """
    target = rank_limited_pinv(r_mat, cfg.n_rf_tx)
    f_a, f_d, residual, history = _altmin_factor(target, cfg.n_rf_tx, max_iters, tol)
    scale = np.sqrt(cfg.n_streams) / np.linalg.norm(f_a @ f_d)
    f_d = f_d * scale
    if return_history:
        return f_a, f_d, residual, history, scale
    return f_a, f_d, residual


def design_hybrid_combiner(
    p_mat: np.ndarray,
    cfg: SystemConfig,
    max_iters: int = 50,
    tol: float = 1e-10,
    return_history: bool = False,
):
    """Mirror of the precoder design: ``w_d_tilde_h @ w_a_h`` tracks the rank-limited pseudo-inverse of p_mat.

    Solved in transposed form so the same alternating kernel applies.
    Returns (w_a_h, w_d_tilde_h, residual[, history, scale]).
    """
    target = rank_limited_pinv(p_mat, cfg.n_rf_rx)
    a_t, d_t, residual, history = _altmin_factor(target.T, cfg.n_rf_rx, max_iters, tol)
    w_a_h, w_d_h = a_t.T, d_t.T
    scale = np.sqrt(cfg.n_streams) / np.linalg.norm(w_d_h @ w_a_h)
    w_d_h = w_d_h * scale
    if return_history:
        return w_a_h, w_d_h, residual, history, scale
    return w_a_h, w_d_h, residual


def default_stream_precoder(n_ris: int, n_streams: int) -> np.ndarray:
    """First n_streams columns of the identity; its pseudo-inverse is its
    conjugate transpose."""
    return np.eye(n_ris, dtype=complex)[:, :n_streams]


def random_stream_precoder(n_ris: int, n_streams: int, rng: np.random.Generator) -> np.ndarray:
    """Orthonormalized random alternative to the identity-column choice."""
    raw = rng.standard_normal((n_ris, n_streams)) + 1j * rng.standard_normal((n_ris, n_streams))
    q, _ = np.linalg.qr(raw)
    return q


def finalize_digital(f_s_choice: np.ndarray, phases: np.ndarray):
    """Close the digital loop for a chosen RIS setting.

    With orthonormal-column ``f_s`` and ``w_s = f_s^H @ conj(diag(phi))``, the
    composed gain ``w_s @ diag(phi) @ f_s`` is the identity by construction.
    """
    f_s = np.asarray(f_s_choice, dtype=complex)
    phases = np.asarray(phases, dtype=float)
    if f_s.ndim != 2 or f_s.shape[0] != phases.shape[0]:
        raise DimensionMismatch(
            f"f_s rows {f_s.shape} must match phase count {phases.shape[0]}"
        )
    gram = f_s.conj().T @ f_s
    if not np.allclose(gram, np.eye(f_s.shape[1]), atol=1e-8):
        raise DimensionMismatch("f_s_choice must have orthonormal columns")
    phi = np.exp(1j * phases)
    w_s = f_s.conj().T * phi.conj()[None, :]
    return f_s, w_s
