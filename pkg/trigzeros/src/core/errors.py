"""
Exception and warning types shared by the numerical core.
"""

from typing import Optional, Sequence


class TrigZerosError(Exception):
    """Base class for every error raised by the laboratory."""


class InvalidModelError(TrigZerosError, ValueError):
    """A coefficient model violates the unit-variance or dependence requirements."""


class InvalidCovarianceError(TrigZerosError, ValueError):
    """A covariance sequence cannot be realized by a Gaussian sampler or oracle."""


class DegenerateFunctionalError(TrigZerosError, ValueError):
    """The functional has zero variance under the standard Gaussian measure."""


class NotACovarianceError(TrigZerosError, ValueError):
    """The density synthesized from a sequence is negative somewhere on the grid."""


class InvalidDensityError(TrigZerosError, ValueError):
    """A spectral density has Fourier coefficients outside the unit disc."""


class AliasingError(TrigZerosError, ValueError):
    """The synthesis grid is too coarse for the polynomial degree."""


class EvaluationError(TrigZerosError, RuntimeError):
    """A field returned non-finite values."""


class ResourceLimitError(TrigZerosError, ValueError):
    """The requested size exceeds what dense or exhaustive methods can handle."""


class DegenerateGridError(TrigZerosError, RuntimeError):
    """The covariance matrix of a sampling grid could not be factorized."""


class DegenerateDensityError(TrigZerosError, ValueError):
    """The spectral density vanishes at the requested angle."""


class ConditioningError(TrigZerosError, RuntimeError):
    """A Toeplitz covariance matrix is numerically singular."""

    def __init__(self, message: str, min_eigenvalue: float, kappa: Optional[float] = None):
        detail = f"{message} (min eigenvalue {min_eigenvalue:.3e}"
        if kappa is not None:
            detail += f", spectral floor kappa {kappa:.3e}"
        super().__init__(detail + ")")
        self.min_eigenvalue = min_eigenvalue
        self.kappa = kappa


class ConfigValidationError(TrigZerosError, ValueError):
    """An experiment configuration failed schema validation."""

    def __init__(self, message: str, fields: Sequence[str] = ()):
        super().__init__(message)
        self.fields = list(fields)


class TruncationWarning(UserWarning):
    """A truncated expansion leaves more residual mass than recommended."""


class ReliabilityWarning(UserWarning):
    """Zero counts were produced with ambiguous grid cells."""
