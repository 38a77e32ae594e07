"""System configuration for the RIS-assisted MIMO link."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError

TWO_PI = 2.0 * np.pi

# Three-phase alphabet used throughout the reference simulations (values are
# stored modulo 2*pi, order preserved).
DEFAULT_PHASE_ALPHABET = (25.0 * np.pi / 36.0, 73.0 * np.pi / 36.0, 49.0 * np.pi / 36.0)


@dataclass(frozen=True)
class SystemConfig:
    """Dimensional and physical parameters of one link configuration.

    ``noise_var`` is derived from ``symbol_power`` and ``snr_db`` unless given
    explicitly.
    """

    n_tx: int = 48
    n_rx: int = 48
    n_rf_tx: int = 8
    n_rf_rx: int = 8
    n_streams: int = 8
    n_ris: int = 12
    phase_alphabet: tuple = DEFAULT_PHASE_ALPHABET
    n_interferers: int = 8
    adc_bits: int = 4
    symbol_power: float = 1.0
    snr_db: float = 0.0
    noise_var: float | None = None
    seed: int = 0

    def __post_init__(self):
        counts = {
            "n_tx": self.n_tx,
            "n_rx": self.n_rx,
            "n_rf_tx": self.n_rf_tx,
            "n_rf_rx": self.n_rf_rx,
            "n_streams": self.n_streams,
            "n_ris": self.n_ris,
            "adc_bits": self.adc_bits,
        }
        for name, value in counts.items():
            if int(value) != value or value < 1:
                raise ConfigError(f"{name} must be a positive integer, got {value!r}")
        if self.n_interferers < 0:
            raise ConfigError("n_interferers must be >= 0")
        if self.n_streams != self.n_rf_rx:
            raise ConfigError("n_streams must equal n_rf_rx")
        if self.n_ris < self.n_interferers + 2:
            raise ConfigError("n_ris must be >= n_interferers + 2 (one slot per path)")
        if self.symbol_power <= 0:
            raise ConfigError("symbol_power must be > 0")
        if not self.phase_alphabet:
            raise ConfigError("phase_alphabet must be nonempty")
        object.__setattr__(
            self, "phase_alphabet", tuple(float(p) % TWO_PI for p in self.phase_alphabet)
        )
        if self.noise_var is None:
            object.__setattr__(
                self, "noise_var", self.symbol_power / 10.0 ** (self.snr_db / 10.0)
            )
        if self.noise_var <= 0:
            raise ConfigError("noise_var must be > 0")

    @property
    def n_paths(self) -> int:
        """Total multipath count: desired + interferers + weak direct term."""
        return self.n_interferers + 2

    @property
    def alphabet_size(self) -> int:
        return len(self.phase_alphabet)

    @property
    def alphabet_array(self) -> np.ndarray:
        return np.asarray(self.phase_alphabet, dtype=float)


def split_seed(master_seed: int, *parts) -> int:
    """Derive an independent 63-bit stream seed from a master seed and labels.

    Stable across platforms and process restarts (SHA-256 of the canonical
    string form), so concurrent trials get reproducible, decorrelated streams.
    """
    text = ":".join([str(int(master_seed))] + [str(p) for p in parts])
    digest = hashlib.sha256(text.encode("ascii")).digest()
    return int.from_bytes(digest[:8], "big") & 0x7FFFFFFFFFFFFFFF
