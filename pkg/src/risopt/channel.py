"""Synthetic multipath channel for a RIS-assisted link with interference.

The effective receive channel factors as ``H(phi) = P @ diag(phi) @ R`` where
``P`` collects the RIS-to-receiver paths and ``R`` the transmitter-to-RIS
paths.  Both are built as geometric sums of rank-one steering-vector products,
one term per propagation path, so the product rank never exceeds the path
count and the quantization-noise term keeps a genuine dependence on the RIS
phases.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import SystemConfig
from .errors import ConfigError

# Direct (non-RIS) interference is folded in as one extra path, 10 dB weaker
# than the reflected paths.
DIRECT_PATH_POWER_DB = -10.0


@dataclass(frozen=True)
class ChannelRealization:
    """One draw of the RIS-assisted channel.

    p_mat : (n_rx, n_ris) RIS-to-receiver effective channel
    r_mat : (n_ris, n_tx) transmitter-to-RIS effective channel
    path_gains : complex gain per path (last entry is the weak direct term)
    aoa, aod : receive / transmit path angles in radians
    """

    p_mat: np.ndarray
    r_mat: np.ndarray
    path_gains: np.ndarray
    aoa: np.ndarray
    aod: np.ndarray

    @property
    def n_paths(self) -> int:
        return len(self.path_gains)

    def effective(self, phases: np.ndarray) -> np.ndarray:
        """Compose ``P @ diag(e^{j*phases}) @ R`` for a phase vector."""
        return (self.p_mat * np.exp(1j * np.asarray(phases))) @ self.r_mat


def steering_vector(angle: float, n_elements: int) -> np.ndarray:
    """Unit-norm ULA steering vector at half-wavelength spacing.

    Entry k is ``exp(j*pi*k*sin(angle)) / sqrt(n)``.
    """
    if n_elements < 1:
        raise ConfigError("n_elements must be >= 1")
    k = np.arange(n_elements)
    return np.exp(1j * np.pi * k * np.sin(angle)) / np.sqrt(n_elements)


def synthesize_channel(cfg: SystemConfig, rng: np.random.Generator) -> ChannelRealization:
    """Draw one channel realization with ``beta + 2`` paths.

    Per path: transmit/receive angles and the two RIS-side angles are uniform
    on (-pi/2, pi/2); the complex gain is circularly-symmetric unit variance.
    ``P`` carries the gain magnitude, ``R`` the gain phase, so the composed
    per-path weight equals the drawn gain.  Deterministic given (cfg, rng
    state).
    """
    gamma = cfg.n_paths
    aod = rng.uniform(-np.pi / 2, np.pi / 2, size=gamma)
    ris_in = rng.uniform(-np.pi / 2, np.pi / 2, size=gamma)
    ris_out = rng.uniform(-np.pi / 2, np.pi / 2, size=gamma)
    aoa = rng.uniform(-np.pi / 2, np.pi / 2, size=gamma)
    gains = (rng.standard_normal(gamma) + 1j * rng.standard_normal(gamma)) / np.sqrt(2.0)
    gains[-1] *= 10.0 ** (DIRECT_PATH_POWER_DB / 20.0)

    p_mat = np.zeros((cfg.n_rx, cfg.n_ris), dtype=complex)
    r_mat = np.zeros((cfg.n_ris, cfg.n_tx), dtype=complex)
    for i in range(gamma):
        a_rx = steering_vector(aoa[i], cfg.n_rx)
        a_out = steering_vector(ris_out[i], cfg.n_ris)
        a_in = steering_vector(ris_in[i], cfg.n_ris)
        a_tx = steering_vector(aod[i], cfg.n_tx)
        p_mat += np.abs(gains[i]) * np.outer(a_rx, a_out.conj())
        r_mat += np.exp(1j * np.angle(gains[i])) * np.outer(a_in, a_tx.conj())

    return ChannelRealization(p_mat=p_mat, r_mat=r_mat, path_gains=gains, aoa=aoa, aod=aod)
