"""
Reference values for Gaussian models: the Kac-Rice expected zero count, the sinc
limit process and the finite-n variance of linear statistics of the local field.
"""

import hashlib
import math
import threading
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate, linalg, signal

from ..utils.logging_utils import get_logger
from ..utils.parallel import chunked, replicate_map
from ..utils.rng import RngStream, stream_range
from .errors import (
    DegenerateDensityError,
    DegenerateGridError,
    InvalidCovarianceError,
    ResourceLimitError,
)
from .spectral import CovarianceSequence, evaluate_density
from .zeros import count_sign_changes

logger = get_logger("trigzeros.core.oracle")

TWO_PI = 2.0 * math.pi
MAX_SINC_GRID = 2048
SINC_RANK_TOL = 1e-13
SINC_NEGATIVITY_TOL = 1e-8
DENSITY_FLOOR = 1e-12
SINC_ZERO_INTENSITY = 2.0 / math.sqrt(3.0)


@dataclass(frozen=True)
class KacRiceSpec:
    """Jointly Gaussian a and b, independent, each stationary with covariance ``rho``."""

    rho: CovarianceSequence
    n: int
    epsrel: float = 1e-8
    limit: int = 400

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("degree n must be at least 1")
        self.rho.validate()


def kac_rice_moments(
    rho: CovarianceSequence, n: int, t
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Var f(t), Cov(f(t), f'(t)) and Var f'(t) for a degree-n polynomial.

    Args:
        rho: Coefficient covariance
        n: Degree
        t: Angles (scalar or vector)

    Returns:
        (v0, v1, v2) broadcast to the shape of ``t``
    """
    t = np.asarray(t, dtype=float)
    h = np.arange(1, n, dtype=float)
    r = rho.at(np.arange(1, n))
    m = n - h
    ht = np.multiply.outer(t, h)
    cos_ht, sin_ht = np.cos(ht), np.sin(ht)

    t0 = n * (n + 1) * (2 * n + 1) / 6.0
    t_h = m * (m + 1) * (2 * m + 1) / 6.0 + h * m * (m + 1) / 2.0
    v0 = n + 2.0 * (cos_ht @ (m * r))
    v1 = -(sin_ht @ (h * m * r))
    v2 = t0 + 2.0 * (cos_ht @ (r * t_h))
    return v0, v1, v2


def _kac_rice_intensity(rho: CovarianceSequence, n: int, t: float) -> float:
    v0, v1, v2 = kac_rice_moments(rho, n, t)
    v0, v1, v2 = float(v0), float(v1), float(v2)
    if v0 <= 0.0:
        raise InvalidCovarianceError(f"Var f({t:.6g}) = {v0:.3e} is not positive")
    return math.sqrt(max(v0 * v2 - v1 * v1, 0.0)) / (math.pi * v0)


def kac_rice_expected_zeros(spec: KacRiceSpec) -> float:
    """
    E N(f_n, [0, 2 pi]) = int_0^{2 pi} sqrt(v0 v2 - v1^2) / (pi v0) dt.

    Args:
        spec: Gaussian model and degree

    Returns:
        Expected zero count
    """
    n = spec.n
    # the integrand oscillates at frequency up to n; split so quad sees a few periods
    # per piece
    pieces = max(1, min(64, n // 4))
    edges = np.linspace(0.0, TWO_PI, pieces + 1)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        value, _ = integrate.quad(
            lambda s: _kac_rice_intensity(spec.rho, n, s),
            lo,
            hi,
            epsrel=spec.epsrel,
            epsabs=0.0,
            limit=spec.limit,
        )
        total += value
    logger.debug(f"Kac-Rice E N for n={n}, rho={spec.rho.label or 'custom'}: {total:.8f}")
    return total


def iid_expected_zeros(n: int) -> float:
    """Closed form for independent coefficients: 2 sqrt((n+1)(2n+1)/6)."""
    if n < 1:
        raise ValueError("degree n must be at least 1")
    return 2.0 * math.sqrt((n + 1) * (2 * n + 1) / 6.0)


def sinc_covariance(grid) -> np.ndarray:
    """Matrix sin(t_i - t_j) / (t_i - t_j), one on the diagonal."""
    grid = np.asarray(grid, dtype=float)
    return np.sinc(np.subtract.outer(grid, grid) / math.pi)


class _SincFactorCache:
    """Square-root factors of sinc covariance matrices, keyed by grid contents."""

    def __init__(self) -> None:
        self._factors: Dict[str, np.ndarray] = {}
        self._lock = threading.Lock()

    @staticmethod
    def _key(grid: np.ndarray) -> str:
        return hashlib.sha256(np.ascontiguousarray(grid).tobytes()).hexdigest()

    def get(self, grid: np.ndarray) -> np.ndarray:
        key = self._key(grid)
        with self._lock:
            factor = self._factors.get(key)
            if factor is None:
                factor = _sinc_factor(grid)
                self._factors[key] = factor
            return factor

    def clear(self) -> None:
        with self._lock:
            self._factors.clear()


def _sinc_factor(grid: np.ndarray) -> np.ndarray:
    matrix = sinc_covariance(grid)
    try:
        eigenvalues, vectors = linalg.eigh(matrix)
    except linalg.LinAlgError as exc:
        raise DegenerateGridError(f"sinc covariance factorization failed: {exc}") from exc
    top = float(eigenvalues.max())
    if eigenvalues.min() < -SINC_NEGATIVITY_TOL * top:
        raise DegenerateGridError(
            f"sinc covariance has eigenvalue {eigenvalues.min():.3e} on this grid"
        )
    keep = eigenvalues > SINC_RANK_TOL * top
    factor = vectors[:, keep] * np.sqrt(eigenvalues[keep])
    logger.debug(f"sinc factor for {len(grid)} points has rank {int(keep.sum())}")
    return factor


_SINC_FACTORS = _SincFactorCache()


def _sinc_grid(grid) -> np.ndarray:
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("grid must be a nonempty vector")
    if grid.size > MAX_SINC_GRID:
        raise ResourceLimitError(f"sinc process sampling is capped at {MAX_SINC_GRID} points")
    if not np.all(np.isfinite(grid)):
        raise DegenerateGridError("grid contains non-finite points")
    return grid


def sample_sinc_process(grid, stream: RngStream) -> np.ndarray:
    """
    One draw of the centered Gaussian process with covariance sinc on ``grid``.

    Args:
        grid: At most 2048 points
        stream: Replicate stream

    Returns:
        Process values on the grid
    """
    return sample_sinc_paths(grid, [stream])[0]


def sample_sinc_paths(grid, streams: Sequence[RngStream]) -> np.ndarray:
    """Draws for several streams sharing one cached factorization, one row per stream."""
    factor = _SINC_FACTORS.get(_sinc_grid(grid))
    rank = factor.shape[1]
    if not streams:
        return np.empty((0, factor.shape[0]))
    noise = np.vstack([s.generator().standard_normal(rank) for s in streams])
    return noise @ factor.T


def sinc_zero_counts(
    grid_size: int = 1024,
    reps: int = 1000,
    seed: int = 0,
    max_workers: int = 1,
    batch_size: int = 256,
) -> np.ndarray:
    """
    Zero counts of the sinc process on [0, 2 pi) for replicates 0..reps-1.

    The process is sampled on grid_size + 1 equispaced points including 2 pi and
    zeros are counted as half-open sign changes.
    """
    if grid_size + 1 > MAX_SINC_GRID:
        raise ResourceLimitError(f"sinc grid of {grid_size + 1} points exceeds {MAX_SINC_GRID}")
    grid = np.linspace(0.0, TWO_PI, grid_size + 1)
    _SINC_FACTORS.get(grid)
    batches = chunked(stream_range(seed, 0, reps), batch_size)

    def _count(batch):
        return count_sign_changes(sample_sinc_paths(grid, batch), axis=-1)

    counts = replicate_map(_count, batches, max_workers)
    return np.concatenate(counts) if counts else np.empty(0, dtype=int)


def clear_sinc_cache() -> None:
    _SINC_FACTORS.clear()


def _loadings(X: float, t: np.ndarray, xi: np.ndarray, n: int) -> Tuple[np.ndarray, np.ndarray]:
    k = np.arange(1, n + 1, dtype=float)
    angles = np.outer(k, X + t / n)
    return np.cos(angles) @ xi, np.sin(angles) @ xi


def sigma_n_sq(X: float, t, xi, rho: CovarianceSequence, n: int) -> float:
    """
    Variance of sum_i xi_i S_n(t_i) divided by psi(X).

    With U_k = sum_i xi_i cos(k (X + t_i / n)) and V_k the matching sine sum,
    Var = (1/n) sum_{|h|<=K} rho(|h|) sum_k (U_k U_{k+h} + V_k V_{k+h}).

    Args:
        X: Base point
        t: Window positions
        xi: Weights, same length as ``t``
        rho: Coefficient covariance
        n: Degree

    Returns:
        sigma_n^2
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    if t.size == 0 or t.shape != xi.shape:
        raise ValueError("t and xi must be nonempty vectors of equal length")
    if n < 1:
        raise ValueError("degree n must be at least 1")

    psi = float(evaluate_density(rho, X))
    if psi < DENSITY_FLOOR:
        raise DegenerateDensityError(f"psi({X:.6g}) = {psi:.3e} is below {DENSITY_FLOOR}")

    U, V = _loadings(float(X), t, xi, n)
    maxlag = min(rho.support, n - 1)
    centre = n - 1
    lagged = (
        signal.correlate(U, U, mode="full", method="auto")
        + signal.correlate(V, V, mode="full", method="auto")
    )[centre : centre + maxlag + 1]
    weights = np.full(maxlag + 1, 2.0)
    weights[0] = 1.0
    variance = float(np.dot(weights * rho.values[: maxlag + 1], lagged)) / n
    return variance / psi


def limit_variance(t, xi) -> float:
    """sum_{i,j} xi_i xi_j sinc(t_i - t_j)."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    return float(xi @ sinc_covariance(t) @ xi)


def kac_rice_from_model(rho_G: Optional[CovarianceSequence], n: int) -> Optional[float]:
    """Kac-Rice value when the coefficients are Gaussian, None otherwise."""
    if rho_G is None:
        return None
    return kac_rice_expected_zeros(KacRiceSpec(rho_G, n))
