"""
Coefficient models and reproducible samplers for (a_{k,n}) and (b_{k,n}).

Every model produces centered, unit-variance coefficients. The two arrays of a
sample are independent draws of the same stationary law.
"""

import hashlib
import json
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from scipy.linalg import cholesky, toeplitz

from ..utils.logging_utils import get_logger
from ..utils.rng import RngStream, as_generator
from .errors import InvalidCovarianceError, InvalidModelError, ResourceLimitError
from .functionals import (
    DEFAULT_HERMITE_ORDER,
    FunctionalKind,
    STANDARDIZATION_TOL,
    FunctionalSpec,
    hermite_coefficients,
)
from .spectral import CovarianceSequence, functional_covariance, ma_autocovariance

logger = get_logger("trigzeros.core.coeffgen")

CHOLESKY_JITTERS = (0.0, 1e-10)
MAX_DENSE_SIZE = 8192
RandomSource = Union[RngStream, np.random.Generator]


class Family(str, Enum):
    """Innovation families with mean 0 and variance 1."""

    GAUSSIAN = "standard-gaussian"
    RADEMACHER = "rademacher"
    UNIFORM = "centered-uniform-unit-variance"
    TWO_POINT = "two-point"


@dataclass(frozen=True)
class InnovationLaw:
    """
    Law of one innovation. ``two-point`` takes ``values[0]`` with probability ``p``
    and ``values[1]`` otherwise.
    """

    family: Family = Family.RADEMACHER
    p: float = 0.5
    values: Tuple[float, float] = (1.0, -1.0)

    def __post_init__(self) -> None:
        if self.family != Family.TWO_POINT:
            return
        if not 0.0 < self.p < 1.0:
            raise InvalidModelError("two-point probability must lie in (0, 1)")
        u, v = self.values
        mean = self.p * u + (1.0 - self.p) * v
        second = self.p * u * u + (1.0 - self.p) * v * v
        if abs(mean) > 1e-12 or abs(second - 1.0) > 1e-12:
            raise InvalidModelError(
                f"two-point law ({u}, {v}) with p={self.p} is not centered with unit variance"
            )

    @classmethod
    def two_point(cls, p: float) -> "InnovationLaw":
        """Standardized two-point law with P(X = sqrt((1-p)/p)) = p."""
        if not 0.0 < p < 1.0:
            raise InvalidModelError("two-point probability must lie in (0, 1)")
        return cls(Family.TWO_POINT, p, (math.sqrt((1.0 - p) / p), -math.sqrt(p / (1.0 - p))))

    def draw(self, size: int, rng: np.random.Generator) -> np.ndarray:
        if self.family == Family.GAUSSIAN:
            return rng.standard_normal(size)
        if self.family == Family.RADEMACHER:
            return 2.0 * rng.integers(0, 2, size=size) - 1.0
        if self.family == Family.UNIFORM:
            return rng.uniform(-math.sqrt(3.0), math.sqrt(3.0), size=size)
        return np.where(rng.random(size) < self.p, self.values[0], self.values[1])

    def describe(self) -> dict:
        out: dict = {"family": self.family.value}
        if self.family == Family.TWO_POINT:
            out.update(p=self.p, values=list(self.values))
        return out


@dataclass(frozen=True, eq=False)
class CoefficientSample:
    """One draw of (a_k)_{k<=n} and (b_k)_{k<=n}."""

    a: np.ndarray
    b: np.ndarray
    fingerprint: str
    stream_id: str

    def __post_init__(self) -> None:
        if self.a.shape != self.b.shape or self.a.ndim != 1:
            raise ValueError("coefficient arrays must be vectors of equal length")
        if not (np.all(np.isfinite(self.a)) and np.all(np.isfinite(self.b))):
            raise ValueError("coefficient arrays must be finite")

    @property
    def n(self) -> int:
        return len(self.a)


class CoefficientModel(ABC):
    """Joint law of one coefficient array."""

    @abstractmethod
    def draw(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """One array of n coefficients."""

    @abstractmethod
    def covariance(self, hermite_order: int = DEFAULT_HERMITE_ORDER) -> CovarianceSequence:
        """Covariance sequence rho of the coefficients."""

    @abstractmethod
    def describe(self) -> dict:
        """Canonical JSON-compatible description."""

    @property
    def memory(self) -> Optional[int]:
        """Dependence range m, or None for infinite-range models."""
        return 0

    def gaussian_covariance(self) -> Optional[CovarianceSequence]:
        """Covariance when the coefficients are jointly Gaussian, else None."""
        return None

    @property
    def fingerprint(self) -> str:
        canonical = json.dumps(self.describe(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


@dataclass(frozen=True, eq=False)
class IidModel(CoefficientModel):
    law: InnovationLaw = field(default_factory=InnovationLaw)

    def draw(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return self.law.draw(n, rng)

    def covariance(self, hermite_order: int = DEFAULT_HERMITE_ORDER) -> CovarianceSequence:
        return CovarianceSequence.white_noise()

    def gaussian_covariance(self) -> Optional[CovarianceSequence]:
        return self.covariance() if self.law.family == Family.GAUSSIAN else None

    def describe(self) -> dict:
        return {"type": "iid", "innovation": self.law.describe()}


@dataclass(frozen=True, eq=False)
class MovingAverageModel(CoefficientModel):
    """a_k = sum_j c_j eps_{k+j}: an m-dependent sequence for a kernel of length m+1."""

    kernel: Tuple[float, ...] = (1.0,)
    law: InnovationLaw = field(default_factory=InnovationLaw)

    def __post_init__(self) -> None:
        kernel = tuple(float(c) for c in self.kernel)
        if not kernel:
            raise InvalidModelError("moving-average kernel is empty")
        if abs(sum(c * c for c in kernel) - 1.0) > 1e-10:
            raise InvalidModelError(
                "moving-average kernel must satisfy sum c_j^2 = 1; use normalize_ma_kernel"
            )
        object.__setattr__(self, "kernel", kernel)

    @classmethod
    def from_raw_kernel(cls, kernel: Sequence[float], law: Optional[InnovationLaw] = None):
        return cls(tuple(normalize_ma_kernel(kernel)), law or InnovationLaw())

    @property
    def memory(self) -> int:
        return len(self.kernel) - 1

    def draw(self, n: int, rng: np.random.Generator) -> np.ndarray:
        innovations = self.law.draw(n + self.memory, rng)
        return np.correlate(innovations, np.asarray(self.kernel), mode="valid")

    def covariance(self, hermite_order: int = DEFAULT_HERMITE_ORDER) -> CovarianceSequence:
        return ma_autocovariance(self.kernel)

    def gaussian_covariance(self) -> Optional[CovarianceSequence]:
        return self.covariance() if self.law.family == Family.GAUSSIAN else None

    def describe(self) -> dict:
        return {
            "type": "moving-average",
            "kernel": list(self.kernel),
            "innovation": self.law.describe(),
        }


@dataclass(frozen=True, eq=False)
class GaussianFunctionalModel(CoefficientModel):
    """a_k = H(X_k) for a stationary Gaussian sequence X with covariance rho_G."""

    rho_G: CovarianceSequence
    functional: FunctionalSpec

    def __post_init__(self) -> None:
        self.rho_G.validate()
        if not self.functional.standardized:
            raise InvalidModelError("functional must be standardized before use")

    @property
    def memory(self) -> Optional[int]:
        return None

    def draw(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return self.functional(sample_stationary_gaussian(self.rho_G, n, rng))

    def covariance(self, hermite_order: int = DEFAULT_HERMITE_ORDER) -> CovarianceSequence:
        return functional_covariance(hermite_coefficients(self.functional, hermite_order), self.rho_G)

    def gaussian_covariance(self) -> Optional[CovarianceSequence]:
        identity = (
            self.functional.kind == FunctionalKind.HERMITE
            and np.allclose(self.functional.hermite, [0.0, 1.0])
            and abs(self.functional.shift) < STANDARDIZATION_TOL
            and abs(self.functional.scale - 1.0) < STANDARDIZATION_TOL
        )
        return self.rho_G if identity else None

    def describe(self) -> dict:
        return {
            "type": "gaussian-functional",
            "rho_G": [float(v) for v in self.rho_G.values],
            "functional": self.functional.describe(),
        }


def normalize_ma_kernel(kernel: Sequence[float]) -> np.ndarray:
    """Scale a kernel to unit l2 norm."""
    c = np.asarray(kernel, dtype=float)
    norm = float(np.linalg.norm(c)) if c.size else 0.0
    if norm == 0.0 or not math.isfinite(norm):
        raise InvalidModelError("moving-average kernel must be nonzero and finite")
    return c / norm


def sample_coefficients(model: CoefficientModel, n: int, stream: RandomSource) -> CoefficientSample:
    """
    Draw independent arrays a and b of length n.

    Args:
        model: Coefficient model
        n: Degree
        stream: Replicate stream (or a positioned generator)

    Returns:
        CoefficientSample tagged with the model fingerprint and stream id
    """
    if n < 1:
        raise ValueError("degree n must be at least 1")
    rng = as_generator(stream)
    a = model.draw(n, rng)
    b = model.draw(n, rng)
    stream_id = stream.stream_id if isinstance(stream, RngStream) else "generator"
    return CoefficientSample(a, b, model.fingerprint, stream_id)


def sample_coefficient_batch(
    model: CoefficientModel, n: int, streams: Sequence[RngStream]
) -> Tuple[np.ndarray, np.ndarray]:
    """Stack samples row-wise: (A, B) with one row per stream."""
    samples = [sample_coefficients(model, n, stream) for stream in streams]
    return np.vstack([s.a for s in samples]), np.vstack([s.b for s in samples])


def _embedding_size(n: int, support: int) -> int:
    return 1 << int(math.ceil(math.log2(max(2 * (n + support), 2))))


def circulant_spectrum(rho: CovarianceSequence, n: int) -> Optional[np.ndarray]:
    """Eigenvalues of the circulant embedding, or None if any is materially negative."""
    size = _embedding_size(n, rho.support)
    half = rho.padded(size // 2 + 1)
    row = np.concatenate([half, half[1:-1][::-1]])
    eigenvalues = np.fft.fft(row).real
    if eigenvalues.min() < -1e-10 * max(eigenvalues.max(), 1.0):
        logger.debug(f"Circulant embedding of size {size} has negative eigenvalue {eigenvalues.min():.3e}")
        return None
    return np.clip(eigenvalues, 0.0, None)


def _cholesky_factor(rho: CovarianceSequence, n: int) -> np.ndarray:
    if n > MAX_DENSE_SIZE:
        raise ResourceLimitError(f"dense Gaussian sampling is capped at n={MAX_DENSE_SIZE}")
    matrix = toeplitz(rho.padded(n))
    for jitter in CHOLESKY_JITTERS:
        try:
            return cholesky(matrix + jitter * np.eye(n), lower=True)
        except np.linalg.LinAlgError:
            logger.debug(f"Cholesky failed with jitter {jitter:g}")
    raise InvalidCovarianceError(
        f"covariance {rho.label or ''} is not positive semidefinite at n={n}"
    )


def sample_stationary_gaussian(
    rho: CovarianceSequence, n: int, stream: RandomSource, method: str = "auto"
) -> np.ndarray:
    """
    Draw a centered stationary Gaussian vector with covariance rho(|i - j|).

    Args:
        rho: Covariance with rho(0) = 1, numerically zero beyond its support
        n: Length of the draw
        stream: Replicate stream (or a positioned generator)
        method: ``auto`` (circulant embedding, Cholesky fallback), ``circulant`` or
            ``cholesky``

    Returns:
        Vector of length n
    """
    if n < 1:
        raise ValueError("length n must be at least 1")
    if method not in ("auto", "circulant", "cholesky"):
        raise ValueError(f"unknown sampling method {method!r}")
    rng = as_generator(stream)

    if method in ("auto", "circulant"):
        eigenvalues = circulant_spectrum(rho, n)
        if eigenvalues is not None:
            size = len(eigenvalues)
            noise = rng.standard_normal(size) + 1j * rng.standard_normal(size)
            return np.fft.fft(np.sqrt(eigenvalues / size) * noise).real[:n]
        if method == "circulant":
            raise InvalidCovarianceError("circulant embedding has negative eigenvalues")
        logger.info(f"Falling back to dense Cholesky sampling for n={n}")

    factor = _cholesky_factor(rho, n)
    return factor @ rng.standard_normal(n)


def empirical_covariance(samples: np.ndarray, maxlag: int) -> CovarianceSequence:
    """
    Lag-h products averaged over positions and replicates, with replicate-level
    standard errors.

    Args:
        samples: Matrix with one replicated coefficient vector per row
        maxlag: Largest lag estimated

    Returns:
        CovarianceSequence of estimates with ``stderr`` attached
    """
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    reps, n = samples.shape
    if reps < 2:
        raise ValueError("empirical covariance needs at least two replicates")
    if maxlag >= n or maxlag < 0:
        raise ValueError(f"maxlag must lie in [0, {n - 1}]")

    per_replicate = np.empty((reps, maxlag + 1))
    for h in range(maxlag + 1):
        per_replicate[:, h] = np.mean(samples[:, : n - h] * samples[:, h:], axis=1)

    estimate = per_replicate.mean(axis=0)
    stderr = per_replicate.std(axis=0, ddof=1) / math.sqrt(reps)
    return CovarianceSequence(estimate, stderr=stderr, label="empirical")

