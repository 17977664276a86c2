"""
Total-variation upper bound between a stationary Gaussian vector and the vector
whose covariance is truncated beyond lag m.
"""

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import pandas as pd
from scipy import linalg

from ..utils.logging_utils import get_logger
from .errors import ConditioningError, NotACovarianceError, ResourceLimitError
from .spectral import (
    DEFAULT_GRID_SIZE,
    CovarianceSequence,
    density_from_finite_covariance,
    density_grid,
    evaluate_density,
    truncate_covariance,
)

logger = get_logger("trigzeros.core.tvbound")

MAX_DIMENSION = 4096
MAX_CONDITION = 1e12
TV_FACTOR = 1.5


@dataclass(frozen=True, eq=False)
class ToeplitzPair:
    """Covariance matrices of the original and the truncated vector."""

    sigma: np.ndarray
    sigma_tilde: np.ndarray

    def __post_init__(self) -> None:
        if self.sigma.ndim != 2 or self.sigma.shape != self.sigma_tilde.shape:
            raise ValueError("matrices must be square and of equal shape")
        if self.sigma.shape[0] != self.sigma.shape[1]:
            raise ValueError("matrices must be square")
        if not (np.allclose(self.sigma, self.sigma.T) and np.allclose(self.sigma_tilde, self.sigma_tilde.T)):
            raise ValueError("covariance matrices must be symmetric")

    @property
    def n(self) -> int:
        return self.sigma.shape[0]

    @classmethod
    def from_covariances(
        cls, rho_G: CovarianceSequence, rho_truncated: CovarianceSequence, n: int
    ) -> "ToeplitzPair":
        if n < 1:
            raise ValueError("dimension n must be at least 1")
        if n > MAX_DIMENSION:
            raise ResourceLimitError(f"dense Toeplitz analysis is capped at n={MAX_DIMENSION}")
        return cls(linalg.toeplitz(rho_G.padded(n)), linalg.toeplitz(rho_truncated.padded(n)))


@dataclass(frozen=True, eq=False)
class TVBoundDetails:
    bound: float
    eigenvalues: np.ndarray = field(repr=False)
    min_eigenvalue: float
    condition_number: float

    @property
    def frobenius(self) -> float:
        return float(np.linalg.norm(self.eigenvalues))


def tv_bound_details(pair: ToeplitzPair, kappa_G: Optional[float] = None) -> TVBoundDetails:
    """
    Eigenvalues of Sigma^{-1} Sigma_tilde - I through the whitened symmetric form
    L^{-1} (Sigma_tilde - Sigma) L^{-T}, with Sigma = L L^T.

    Args:
        pair: Toeplitz matrices
        kappa_G: Density infimum, quoted in conditioning errors

    Returns:
        TVBoundDetails with the bound 1.5 * min(1, ||lambda||_2)
    """
    if pair.n > MAX_DIMENSION:
        raise ResourceLimitError(f"dense Toeplitz analysis is capped at n={MAX_DIMENSION}")

    spectrum = linalg.eigvalsh(pair.sigma)
    lam_min, lam_max = float(spectrum[0]), float(spectrum[-1])
    condition = lam_max / lam_min if lam_min > 0 else math.inf
    if condition >= MAX_CONDITION:
        raise ConditioningError(
            f"Sigma has condition number {condition:.3e} at n={pair.n}", lam_min, kappa_G
        )

    factor = linalg.cholesky(pair.sigma, lower=True)
    difference = pair.sigma_tilde - pair.sigma
    half = linalg.solve_triangular(factor, difference, lower=True)
    whitened = linalg.solve_triangular(factor, half.T, lower=True)
    whitened = 0.5 * (whitened + whitened.T)
    eigenvalues = linalg.eigvalsh(whitened)

    bound = TV_FACTOR * min(1.0, float(np.linalg.norm(eigenvalues)))
    return TVBoundDetails(bound, eigenvalues, lam_min, condition)


def tv_upper_bound(pair: ToeplitzPair) -> float:
    return tv_bound_details(pair).bound


def trace_bound(rho_G: CovarianceSequence, n: int, m: int, kappa_G: float) -> float:
    """1.5 * min(1, sqrt(n^2 sum_{k>m} rho_G(k)^2 / kappa_G^2)), using lambda_min >= kappa_G."""
    if kappa_G <= 0:
        raise ValueError("kappa_G must be positive")
    tail = rho_G.values[m + 1: n]
    return TV_FACTOR * min(1.0, math.sqrt(n * n * float(np.dot(tail, tail))) / kappa_G)


def _density_minimum(rho: CovarianceSequence, grid_size: int) -> float:
    try:
        return density_from_finite_covariance(rho, grid_size).kappa
    except NotACovarianceError:
        return float(np.min(evaluate_density(rho, density_grid(grid_size))))


def truncation_sweep(
    rho_G: CovarianceSequence,
    n: int,
    m_list: Sequence[int],
    grid_size: int = DEFAULT_GRID_SIZE,
) -> pd.DataFrame:
    """
    TV and trace bounds for each truncation lag.

    Args:
        rho_G: Gaussian covariance
        n: Dimension
        m_list: Ascending truncation lags
        grid_size: Density grid for kappa

    Returns:
        DataFrame with columns m, tv_bound, trace_bound, kappa, valid
    """
    lags = [int(m) for m in m_list]
    if any(b < a for a, b in zip(lags, lags[1:])):
        raise ValueError("m_list must be ascending")

    kappa_G = density_from_finite_covariance(rho_G, grid_size).kappa
    rows = []
    for m in lags:
        truncated, valid = truncate_covariance(rho_G, m, grid_size)
        pair = ToeplitzPair.from_covariances(rho_G, truncated, n)
        rows.append(
            {
                "m": m,
                "tv_bound": tv_bound_details(pair, kappa_G).bound,
                "trace_bound": trace_bound(rho_G, n, m, kappa_G),
                "kappa": _density_minimum(truncated, grid_size),
                "valid": valid,
            }
        )
        logger.debug(f"Truncation m={m}: {rows[-1]}")
    return pd.DataFrame(rows, columns=["m", "tv_bound", "trace_bound", "kappa", "valid"])
