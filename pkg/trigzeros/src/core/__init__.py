"""Numerical core: coefficient models, spectral densities, zero counting and oracles."""

from .coeffgen import GaussianFunctionalModel, IidModel, InnovationLaw, MovingAverageModel
from .spectral import CovarianceSequence, SpectralDensity
from .trigpoly import TrigPolynomial, local_field
from .zeros import count_zeros, count_zeros_local

__all__ = [
    "CovarianceSequence",
    "GaussianFunctionalModel",
    "IidModel",
    "InnovationLaw",
    "MovingAverageModel",
    "SpectralDensity",
    "TrigPolynomial",
    "count_zeros",
    "count_zeros_local",
    "local_field",
]
