"""Exception types shared across the package."""


class RisOptError(Exception):
    """Base class for all package errors."""


class ConfigError(RisOptError):
    """Invalid system or experiment configuration."""


class DimensionMismatch(RisOptError):
    """Operands have incompatible shapes."""


class RankDeficient(RisOptError):
    """Matrix does not have the row/column rank the operation requires."""


class InvalidBits(RisOptError):
    """ADC resolution outside the supported range."""


class Singular(RisOptError):
    """Matrix is singular at the working tolerance."""


class ZeroPower(RisOptError):
    """Power budget denominator is not positive."""


class AlphabetViolation(RisOptError):
    """Phase value or index outside the configured alphabet."""


class EmptyPool(RisOptError):
    """Candidate pool contains no sequences."""


class BudgetExceeded(RisOptError):
    """Search exceeded its leaf-evaluation cap."""


class SpaceTooLarge(RisOptError):
    """Enumeration refused because K**M exceeds the configured cap."""


class EigFailure(RisOptError):
    """Power iteration failed to converge."""
