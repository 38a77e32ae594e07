"""Quantizer model, MSE/CRLB/rate metrics, and the RIS phase objective.

The b-bit ADCs are linearized as a gain ``alpha`` plus uncorrelated Gaussian
noise whose diagonal covariance depends on the combined receive signal, hence
on the RIS phases.  That dependence is the only way the phase setting enters
the search objective: a unitary diagonal conjugation leaves every Frobenius
norm unchanged, so with the quantization-noise covariance frozen the objective
is flat across phase settings.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization
from .errors import DimensionMismatch, InvalidBits, Singular, ZeroPower

_SING_TOL = 1e-12


@dataclass(frozen=True)
class QuantModel:
    """AQNM linearization of a b-bit ADC bank."""

    adc_bits: int
    alpha: float
    dq2: np.ndarray

    @classmethod
    def from_receive_chain(cls, adc_bits, w_a_h, h_eff) -> "QuantModel":
        alpha = aqnm_alpha(adc_bits)
        return cls(adc_bits=adc_bits, alpha=alpha, dq2=quant_noise_cov(w_a_h, h_eff, alpha))


@dataclass(frozen=True)
class MetricReport:
    """Per-candidate link metrics."""

    mse_matrix: np.ndarray
    mse: float
    crlb_matrix: np.ndarray
    rate_bits: float
    energy_eff: float
    objective: float


@dataclass(frozen=True)
class PowerBudget:
    """Power accounting for energy efficiency.

    The per-conversion-step energy default (15.4 pJ) and unit transceiver
    powers are configurable placeholders: efficiency curves are used for
    relative comparison only.
    """

    p_tx_watts: float = 1.0
    p_rx_watts: float = 1.0
    p_ris_watts: float = 0.0
    adc_energy_per_step: float = 15.4e-12
    sampling_rate_hz: float = 4.0e8


def aqnm_alpha(b: int) -> float:
    """Quantizer gain ``1 - (pi*sqrt(3)/2) * 2**(-2b)`` for b-bit ADCs."""
    if int(b) != b or b < 1:
        raise InvalidBits(f"adc bits must be an integer >= 1, got {b!r}")
    return 1.0 - (np.pi * np.sqrt(3.0) / 2.0) * 2.0 ** (-2 * int(b))


def quant_noise_cov(w_a_h: np.ndarray, h_eff: np.ndarray, alpha: float) -> np.ndarray:
    """Quantization-noise covariance ``alpha(1-alpha) diag[Wa H (Wa H)^H + I]``."""
    w_a_h = np.asarray(w_a_h)
    h_eff = np.asarray(h_eff)
    if w_a_h.shape[1] != h_eff.shape[0]:
        raise DimensionMismatch(
            f"combiner columns {w_a_h.shape[1]} != channel rows {h_eff.shape[0]}"
        )
    z = w_a_h @ h_eff
    diag = np.einsum("ij,ij->i", z, z.conj()).real + 1.0
    return alpha * (1.0 - alpha) * np.diag(diag)


def mse_matrix(k_eff, w, w_d_h, dq2, alpha, sigma_n2, p) -> np.ndarray:
    """Error covariance of the combined output against the sent streams.

    ``p (K-I)(K-I)^H + alpha^2 sigma_n^2 W W^H + W_D^H Dq^2 W_D`` for the
    composed gain K and full combine chain W = W_D^H W_A^H.
    """
    k_eff = np.asarray(k_eff)
    n = k_eff.shape[0]
    if k_eff.shape != (n, n):
        raise DimensionMismatch("composed gain must be square")
    if np.asarray(w).shape[0] != n or np.asarray(w_d_h).shape[0] != n:
        raise DimensionMismatch("combiner row count must match the stream count")
    err = k_eff - np.eye(n)
    m = (
        p * err @ err.conj().T
        + (alpha**2) * sigma_n2 * w @ np.asarray(w).conj().T
        + w_d_h @ np.asarray(dq2) @ np.asarray(w_d_h).conj().T
    )
    return 0.5 * (m + m.conj().T)


def noise_covariance(w, w_d_h, dq2, alpha, sigma_n2) -> np.ndarray:
    """Covariance of the combined noise: thermal term plus quantization term."""
    c = (alpha**2) * sigma_n2 * w @ np.asarray(w).conj().T + np.asarray(w_d_h) @ np.asarray(
        dq2
    ) @ np.asarray(w_d_h).conj().T
    return 0.5 * (c + c.conj().T)


def _solve_hermitian(mat: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    s = np.linalg.svd(mat, compute_uv=False)
    if s[-1] <= _SING_TOL * s[0]:
        raise Singular("matrix singular at working tolerance")
    return np.linalg.solve(mat, rhs)


def crlb(k_eff: np.ndarray, noise_cov_c: np.ndarray) -> np.ndarray:
    """Estimator-covariance lower bound ``(K^H C^{-1} K)^{-1}``."""
    k_eff = np.asarray(k_eff)
    c = np.asarray(noise_cov_c)
    sk = np.linalg.svd(k_eff, compute_uv=False)
    if sk[-1] <= _SING_TOL * sk[0]:
        raise Singular("composed gain singular at working tolerance")
    fisher = k_eff.conj().T @ _solve_hermitian(c, k_eff)
    out = np.linalg.inv(fisher)
    return 0.5 * (out + out.conj().T)


def info_rate(mse_mat: np.ndarray, p: float, n_streams: int) -> float:
    """Achievable rate ``N log2 p + log2 det(M^{-1} + I/p)`` in bits/s/Hz."""
    mse_mat = np.asarray(mse_mat)
    s = np.linalg.svd(mse_mat, compute_uv=False)
    if s[-1] <= _SING_TOL * s[0]:
        raise Singular("MSE matrix singular at working tolerance")
    inner = np.linalg.inv(mse_mat) + np.eye(n_streams) / p
    sign, logdet = np.linalg.slogdet(inner)
    if sign.real <= 0:
        raise Singular("non-positive determinant in rate computation")
    return n_streams * np.log2(p) + logdet / np.log(2.0)


def info_rate_from_gain(k_eff: np.ndarray, noise_cov_c: np.ndarray, p: float) -> float:
    """Rate in its pre-simplification form ``log2 det(p K K^H C^{-1} + I)``."""
    k_eff = np.asarray(k_eff)
    n = k_eff.shape[0]
    inner = p * k_eff @ k_eff.conj().T @ np.linalg.inv(np.asarray(noise_cov_c)) + np.eye(n)
    sign, logdet = np.linalg.slogdet(inner)
    if sign.real <= 0:
        raise Singular("non-positive determinant in rate computation")
    return logdet / np.log(2.0)


def energy_efficiency(
    rate: float,
    p_tx: float,
    p_rx: float,
    p_ris: float,
    c_per_step: float,
    f_s: float,
    b: int,
    n_streams: int,
) -> float:
    """Rate per Watt with the ADC bank charged ``2 N c f_s 2^b``."""
    if min(p_tx, p_rx, p_ris, c_per_step) < 0:
        raise ZeroPower("power terms must be nonnegative")
    total = p_tx + p_rx + p_ris + 2.0 * n_streams * c_per_step * f_s * 2.0**b
    if total <= 0:
        raise ZeroPower("total consumed power must be positive")
    return rate / total


def objective_f(
    phases: np.ndarray,
    w_d_tilde_h: np.ndarray,
    w_a_h: np.ndarray,
    sigma_n2: float,
    alpha: float,
    dq2_of_phase: np.ndarray,
) -> float:
    """Literal form of the phase-search objective.

    ``|| diag(phi)^-1 Wd [sigma^2 Wa Wa^H-chain + Dq^2/alpha^2] Wd^H diag(phi) ||_F^2``
    with the quantization covariance supplied by the caller (recomputed per
    phase setting in the search; frozen for the conjugation-invariance check).
    """
    phi = np.exp(1j * np.asarray(phases, dtype=float))
    w_a = np.asarray(w_a_h).conj().T
    inner = sigma_n2 * np.asarray(w_a_h) @ w_a + np.asarray(dq2_of_phase) / alpha**2
    core = np.asarray(w_d_tilde_h) @ inner @ np.asarray(w_d_tilde_h).conj().T
    conj = (core * phi[None, :].conj()) * phi[:, None]
    return float(np.linalg.norm(conj, "fro") ** 2)


class PhaseObjective:
    """Fast evaluator of the phase objective over alphabet-index sequences.

    Precomputes everything phase-independent so that single and batched
    evaluations reduce to small quadratic forms in the per-chain quantization
    noise levels.  Batched evaluation is what makes exhaustive enumeration at
    K=3, M=12 tractable.
    """

    def __init__(self, chan: ChannelRealization, w_a_h, w_d_tilde_h, alpha, sigma_n2,
                 alphabet: np.ndarray):
        self.chan = chan
        self.w_a_h = np.asarray(w_a_h)
        self.w_d_tilde_h = np.asarray(w_d_tilde_h)
        self.alpha = float(alpha)
        self.sigma_n2 = float(sigma_n2)
        self.alphabet = np.asarray(alphabet, dtype=float)
        self.n_calls = 0

        wd = self.w_d_tilde_h  # (M, N)
        c0 = (1.0 - alpha) / alpha
        a_fixed = sigma_n2 * self.w_a_h @ self.w_a_h.conj().T  # (N, N)
        # A0 collects everything independent of the quantizer diagonal.
        a0 = wd @ a_fixed @ wd.conj().T + c0 * (wd @ wd.conj().T)
        self._a0_norm2 = float(np.linalg.norm(a0, "fro") ** 2)
        self._c0 = c0
        # Column i of wd is the direction chain i's quantization noise takes.
        self._t = np.einsum("mi,mn,ni->i", wd.conj(), a0, wd).real
        self._g = np.abs(wd.conj().T @ wd) ** 2

        b_mat = self.w_a_h @ chan.p_mat  # (N, M)
        s_mat = chan.r_mat @ chan.r_mat.conj().T  # (M, M)
        # Per-chain quadratic kernels for the quantizer diagonal.
        self._kernels = np.einsum("im,mn,in->imn", b_mat, s_mat, b_mat.conj())

    @property
    def n_ris(self) -> int:
        return self.chan.p_mat.shape[1]

    def quant_diag(self, indices: np.ndarray) -> np.ndarray:
        """Diagonal of ``Wa H (Wa H)^H`` for one index sequence."""
        u = np.exp(1j * self.alphabet[np.asarray(indices)])
        return np.einsum("imn,m,n->i", self._kernels, u, u.conj()).real

    def dq2(self, indices: np.ndarray) -> np.ndarray:
        """Quantization-noise covariance for one index sequence."""
        d = self.quant_diag(indices)
        return self.alpha * (1.0 - self.alpha) * np.diag(d + 1.0)

    def __call__(self, indices) -> float:
        self.n_calls += 1
        d = self.quant_diag(indices)
        return self._combine(d[None, :])[0]

    def batch(self, index_rows: np.ndarray) -> np.ndarray:
        """Objective for every row of an (n, M) index array."""
        d = self.quant_diag_batch(index_rows)
        self.n_calls += d.shape[0]
        return self._combine(d)

    def quant_diag_batch(self, index_rows: np.ndarray) -> np.ndarray:
        """Quantizer diagonals for many sequences at once.

        Depends only on the channel and analog combiner, not on the noise
        level or ADC resolution, so sweeps over those reuse it.
        """
        index_rows = np.asarray(index_rows)
        u = np.exp(1j * self.alphabet[index_rows])  # (n, M)
        return np.einsum("imn,bm,bn->bi", self._kernels, u, u.conj(), optimize=True).real

    def values_from_quant_diag(self, d: np.ndarray) -> np.ndarray:
        """Objective values from precomputed quantizer diagonals."""
        self.n_calls += np.asarray(d).shape[0]
        return self._combine(np.asarray(d))

    def _combine(self, d: np.ndarray) -> np.ndarray:
        lin = 2.0 * self._c0 * d @ self._t
        quad = (self._c0**2) * np.einsum("bi,ij,bj->b", d, self._g, d)
        return self._a0_norm2 + lin + quad
