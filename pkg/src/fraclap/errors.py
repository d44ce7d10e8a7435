"""Exception types raised across the package."""


class FraclapError(Exception):
    """Base class for all package errors."""


class AliasingError(FraclapError, ValueError):
    """Requested spectral cutoff cannot be resolved on the grid."""


class SymmetryError(FraclapError, ValueError):
    """Coefficients are too far from Hermitian symmetry to give a real function."""


class DomainError(FraclapError, ValueError):
    """Argument outside the domain of a function or operator."""


class AccuracyError(FraclapError, ArithmeticError):
    """A numerical procedure failed to reach its requested accuracy."""

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class ConfigurationError(FraclapError, ValueError):
    """Inconsistent or unusable configuration object."""


class UnsupportedError(FraclapError, NotImplementedError):
    """Valid request outside the implemented scope."""


class ExponentError(FraclapError, ValueError):
    """Hölder exponent bookkeeping violates a required constraint."""
