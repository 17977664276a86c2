"""
Covariance sequences, spectral densities and the Hermite resummation.

Convention used throughout: rho(k) = (1/2pi) * int_{-pi}^{pi} e^{ikx} psi(x) dx, so a
white sequence has psi == 1 and (1/2pi) * int psi = rho(0) = 1.

Density grids are x_j = -pi + 2 pi j / G, j = 0..G-1, which makes x_{G-j} = -x_j.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np
import pandas as pd
from numpy.polynomial import polynomial as P
from scipy.special import polygamma

from ..utils.logging_utils import get_logger
from .errors import InvalidDensityError, InvalidModelError, NotACovarianceError
from .functionals import HermiteExpansion

logger = get_logger("trigzeros.core.spectral")

DEFAULT_GRID_SIZE = 4096
NEGATIVITY_TOL = 1e-9
KAPPA_VALID_TOL = 1e-10
BARGMANN_FOCK = "bargmann_fock"
EXPONENTIAL = "exponential"
CLOSED_FORMS = (BARGMANN_FOCK, EXPONENTIAL)


@dataclass(frozen=True, eq=False)
class CovarianceSequence:
    """Values rho(0..K) of a stationary covariance; zero beyond the support K."""

    values: np.ndarray
    stderr: Optional[np.ndarray] = field(default=None, repr=False)
    label: str = ""

    def __post_init__(self) -> None:
        values = np.atleast_1d(np.asarray(self.values, dtype=float))
        if values.ndim != 1 or values.size == 0:
            raise ValueError("covariance values must be a nonempty vector")
        if not np.all(np.isfinite(values)):
            raise ValueError("covariance values must be finite")
        object.__setattr__(self, "values", values)

    @property
    def support(self) -> int:
        return len(self.values) - 1

    def at(self, lags) -> np.ndarray:
        """rho(|h|) for integer lags, zero beyond the support."""
        lags = np.abs(np.asarray(lags, dtype=int))
        out = np.zeros(lags.shape)
        inside = lags <= self.support
        out[inside] = self.values[lags[inside]]
        return out

    def padded(self, length: int) -> np.ndarray:
        """rho(0..length-1), zero-padded or cut."""
        out = np.zeros(length)
        count = min(length, len(self.values))
        out[:count] = self.values[:count]
        return out

    def truncated(self, m: int) -> "CovarianceSequence":
        return CovarianceSequence(self.values[: m + 1].copy(), label=f"{self.label}|m={m}")

    def validate(self, tol: float = 1e-9) -> None:
        """Check rho(0) = 1 and |rho(h)| <= 1."""
        if abs(self.values[0] - 1.0) > tol:
            raise NotACovarianceError(f"rho(0) = {self.values[0]!r}, expected 1")
        if np.any(np.abs(self.values) > 1.0 + tol):
            raise NotACovarianceError("covariance exceeds 1 in modulus")

    @classmethod
    def white_noise(cls) -> "CovarianceSequence":
        return cls(np.array([1.0]), label="white")

    @classmethod
    def from_function(
        cls, fn: Callable[[np.ndarray], np.ndarray], support: int, label: str = ""
    ) -> "CovarianceSequence":
        lags = np.arange(support + 1, dtype=float)
        return cls(np.asarray(fn(lags), dtype=float), label=label)


@dataclass(frozen=True, eq=False)
class SpectralDensity:
    """Samples of psi on the symmetric grid, with its infimum kappa."""

    values: np.ndarray
    kappa: float
    closed_form: Optional[str] = None
    covariance: Optional[CovarianceSequence] = field(default=None, repr=False)

    @property
    def grid_size(self) -> int:
        return len(self.values)

    @property
    def grid(self) -> np.ndarray:
        return density_grid(self.grid_size)

    @property
    def is_valid(self) -> bool:
        return self.kappa > KAPPA_VALID_TOL

    def mass(self) -> float:
        """(1/2pi) * int psi by the periodic trapezoid rule."""
        return float(np.mean(self.values))

    def symmetry_defect(self) -> float:
        mirrored = self.values[1:][::-1]
        return float(np.max(np.abs(self.values[1:] - mirrored))) if self.grid_size > 1 else 0.0

    def at(self, x) -> np.ndarray:
        """psi at arbitrary angles (exact when a series or closed form is attached)."""
        if self.covariance is not None:
            return evaluate_density(self.covariance, x)
        if self.closed_form is not None:
            return closed_form_density(self.closed_form, x)
        x = np.asarray(x, dtype=float)
        grid = np.append(self.grid, math.pi)
        values = np.append(self.values, self.values[0])
        wrapped = np.mod(x + math.pi, 2.0 * math.pi) - math.pi
        return np.interp(wrapped, grid, values)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"x": self.grid, "psi": self.values})


def density_grid(size: int) -> np.ndarray:
    return -math.pi + 2.0 * math.pi * np.arange(size) / size


def evaluate_density(rho: CovarianceSequence, x) -> np.ndarray:
    """psi(x) = rho(0) + 2 sum_{h>=1} rho(h) cos(hx) at arbitrary angles."""
    x = np.asarray(x, dtype=float)
    lags = np.arange(1, rho.support + 1)
    if lags.size == 0:
        return np.full(x.shape, rho.values[0])
    return rho.values[0] + 2.0 * np.cos(np.multiply.outer(x, lags)) @ rho.values[1:]


def _symmetrize(values: np.ndarray) -> np.ndarray:
    out = values.copy()
    out[1:] = 0.5 * (values[1:] + values[1:][::-1])
    return out


def density_from_finite_covariance(
    rho: CovarianceSequence, grid_size: int = DEFAULT_GRID_SIZE
) -> SpectralDensity:
    """
    Synthesize psi(x) = 1 + 2 sum_{h=1}^{K} rho(h) cos(hx) on the density grid.

    Args:
        rho: Covariance with support K < grid_size / 2
        grid_size: Number of grid points G

    Returns:
        Density with kappa attached

    Raises:
        NotACovarianceError: if min psi < -1e-9
    """
    if rho.support >= grid_size // 2:
        raise ValueError(f"support {rho.support} needs a grid larger than {grid_size}")

    spectrum = np.zeros(grid_size // 2 + 1)
    signs = np.where(np.arange(rho.support + 1) % 2 == 0, 1.0, -1.0)
    spectrum[: rho.support + 1] = rho.values * signs
    # irfft counts interior coefficients twice, matching the symmetric sum over +-h
    values = _symmetrize(np.fft.irfft(spectrum, n=grid_size) * grid_size)

    density = _with_kappa(values, covariance=rho)
    if density.kappa < -NEGATIVITY_TOL:
        raise NotACovarianceError(
            f"density of {rho.label or 'covariance'} dips to {density.kappa:.3e}"
        )
    return density


def covariance_from_density(psi: SpectralDensity, support: Optional[int] = None) -> CovarianceSequence:
    """Fourier coefficients rho(0..K) of sampled density values."""
    size = psi.grid_size
    support = size // 2 - 1 if support is None else support
    if support >= size // 2:
        raise ValueError("support must stay below half the grid size")
    coefficients = np.fft.rfft(psi.values).real[: support + 1] / size
    signs = np.where(np.arange(support + 1) % 2 == 0, 1.0, -1.0)
    return CovarianceSequence(coefficients * signs, label="from-density")


def ma_autocovariance(kernel) -> CovarianceSequence:
    """rho(h) = sum_j c_j c_{j+h} for a moving-average kernel."""
    c = np.asarray(kernel, dtype=float)
    full = np.correlate(c, c, mode="full")
    return CovarianceSequence(full[len(c) - 1:], label=f"ma{len(c) - 1}")


def ma_density(kernel, grid_size: int = DEFAULT_GRID_SIZE) -> SpectralDensity:
    """
    Density of a normalized moving average, cross-checked against |sum_j c_j e^{ijx}|^2.
    """
    c = np.asarray(kernel, dtype=float)
    if abs(float(np.dot(c, c)) - 1.0) > 1e-10:
        raise InvalidModelError("moving-average kernel must have unit l2 norm")

    density = density_from_finite_covariance(ma_autocovariance(c), grid_size)
    transfer = np.exp(1j * np.multiply.outer(density.grid, np.arange(len(c)))) @ c
    if not np.allclose(density.values, np.abs(transfer) ** 2, atol=1e-10, rtol=0.0):
        raise InvalidDensityError("moving-average density disagrees with its transfer function")
    return density


def functional_covariance(
    expansion: HermiteExpansion, rho_G: CovarianceSequence
) -> CovarianceSequence:
    """
    rho(h) = sum_{q<=Q} c_q^2 q! rho_G(h)^q, with rho(0) = 1.

    Setting rho(0) = 1 assigns the truncated residual mass to lag zero, so the
    resulting density picks up a constant floor equal to the residual.
    """
    values = P.polyval(rho_G.values, expansion.weights)
    values[0] = 1.0
    return CovarianceSequence(values, label=f"H({rho_G.label})")


def functional_density(
    expansion: HermiteExpansion, psi_G: SpectralDensity
) -> SpectralDensity:
    """
    Density of H(X_k) from the density of X_k, resummed in Fourier space.

    Convolution powers of psi_G become powers of its Fourier coefficients, so the
    result is synthesized from sum_q c_q^2 q! rho_G(k)^q.
    """
    rho_G = covariance_from_density(psi_G)
    if np.max(np.abs(rho_G.values)) > 1.0 + 1e-9:
        raise InvalidDensityError("Fourier coefficients of psi_G exceed 1 in modulus")
    rho = functional_covariance(expansion, rho_G)
    return density_from_finite_covariance(rho, psi_G.grid_size)


def gaussian_covariance(support: int = 12) -> CovarianceSequence:
    """rho_G(k) = exp(-k^2 / 2), the coefficients of the Bargmann-Fock density."""
    return CovarianceSequence.from_function(lambda k: np.exp(-0.5 * k**2), support, BARGMANN_FOCK)


def exponential_covariance(support: int = 40) -> CovarianceSequence:
    """rho_G(k) = exp(-|k|), the coefficients of the exponential density."""
    return CovarianceSequence.from_function(lambda k: np.exp(-np.abs(k)), support, EXPONENTIAL)


def exponential_density_exact(x) -> np.ndarray:
    """Resummed sum_k 2 / (1 + (x + 2 pi k)^2) = sinh(1) / (cosh(1) - cos x)."""
    x = np.asarray(x, dtype=float)
    return math.sinh(1.0) / (math.cosh(1.0) - np.cos(x))


def closed_form_density(kind: str, x, terms: Optional[int] = None) -> np.ndarray:
    """
    Periodized closed-form densities.

    bargmann_fock: sqrt(2 pi) sum_k exp(-(x + 2 pi k)^2 / 2), |k| <= 6.
    exponential: sum_k 2 / (1 + (x + 2 pi k)^2), |k| <= 10^4, plus the asymptotic
    tail (1/pi^2) * trigamma(K + 1).
    """
    x = np.asarray(x, dtype=float)
    if kind == BARGMANN_FOCK:
        k = np.arange(-(terms or 6), (terms or 6) + 1)
        shifted = np.add.outer(x, 2.0 * math.pi * k)
        return math.sqrt(2.0 * math.pi) * np.exp(-0.5 * shifted**2).sum(axis=-1)
    if kind == EXPONENTIAL:
        cutoff = terms or 10_000
        total = np.zeros(x.shape)
        for start in range(-cutoff, cutoff + 1, 1000):
            k = np.arange(start, min(start + 1000, cutoff + 1))
            shifted = np.add.outer(x, 2.0 * math.pi * k)
            total = total + (2.0 / (1.0 + shifted**2)).sum(axis=-1)
        return total + float(polygamma(1, cutoff + 1)) / math.pi**2
    raise ValueError(f"unknown closed form {kind!r}; expected one of {CLOSED_FORMS}")


def closed_form_spectral_density(kind: str, grid_size: int = DEFAULT_GRID_SIZE) -> SpectralDensity:
    values = _symmetrize(closed_form_density(kind, density_grid(grid_size)))
    return _with_kappa(values, closed_form=kind)


def _local_minima(values: np.ndarray, limit: int = 64) -> np.ndarray:
    left = np.roll(values, 1)
    right = np.roll(values, -1)
    candidates = np.flatnonzero((values <= left) & (values <= right))
    if candidates.size > limit:
        candidates = candidates[np.argsort(values[candidates])[:limit]]
    return candidates


def _newton_minimum(rho: CovarianceSequence, x0: np.ndarray, spacing: float) -> np.ndarray:
    lags = np.arange(1, rho.support + 1)
    if lags.size == 0:
        return np.full(x0.shape, rho.values[0])
    weights = rho.values[1:]
    phase = np.multiply.outer(x0, lags)
    first = -2.0 * np.sin(phase) @ (lags * weights)
    second = -2.0 * np.cos(phase) @ (lags**2 * weights)
    step = np.where(second > 0, -first / np.where(second > 0, second, 1.0), 0.0)
    step = np.clip(step, -spacing, spacing)
    return evaluate_density(rho, x0 + step)


def _parabolic_vertex(values: np.ndarray, idx: np.ndarray, spacing: float) -> np.ndarray:
    left = values[(idx - 1) % len(values)]
    mid = values[idx]
    right = values[(idx + 1) % len(values)]
    curvature = left - 2.0 * mid + right
    safe = np.where(curvature > 0, curvature, 1.0)
    offset = np.where(curvature > 0, 0.5 * (left - right) / safe, 0.0)
    return np.clip(offset, -1.0, 1.0) * spacing


def kappa(psi: SpectralDensity) -> float:
    """
    Infimum of psi: grid minimum refined by one step per local minimizer.

    The step is Newton's on the exact cosine series when the covariance is known,
    a parabolic vertex evaluated on the closed form otherwise.
    """
    return _refined_minimum(psi.values, psi.covariance, psi.closed_form)


def _refined_minimum(
    values: np.ndarray,
    covariance: Optional[CovarianceSequence],
    closed_form: Optional[str],
) -> float:
    grid_min = float(np.min(values))
    spacing = 2.0 * math.pi / len(values)
    idx = _local_minima(values)
    x0 = density_grid(len(values))[idx]

    if covariance is not None:
        refined = _newton_minimum(covariance, x0, spacing)
    elif closed_form is not None:
        refined = closed_form_density(closed_form, x0 + _parabolic_vertex(values, idx, spacing))
    else:
        left = values[(idx - 1) % len(values)]
        right = values[(idx + 1) % len(values)]
        curvature = left - 2.0 * values[idx] + right
        safe = np.where(curvature > 0, curvature, 1.0)
        refined = np.where(
            curvature > 0, values[idx] - (left - right) ** 2 / (8.0 * safe), values[idx]
        )

    if refined.size == 0:
        return grid_min
    return min(grid_min, float(np.min(refined)))


def _with_kappa(
    values: np.ndarray,
    covariance: Optional[CovarianceSequence] = None,
    closed_form: Optional[str] = None,
) -> SpectralDensity:
    return SpectralDensity(
        values=values,
        kappa=_refined_minimum(values, covariance, closed_form),
        closed_form=closed_form,
        covariance=covariance,
    )


def truncate_covariance(
    rho_G: CovarianceSequence, m: int, grid_size: int = DEFAULT_GRID_SIZE
) -> Tuple[CovarianceSequence, bool]:
    """
    Cut rho_G beyond lag m and report whether the truncated density stays positive.
    """
    if m < 0:
        raise ValueError("truncation lag must be nonnegative")
    truncated = rho_G.truncated(m)
    try:
        valid = density_from_finite_covariance(truncated, grid_size).is_valid
    except NotACovarianceError:
        valid = False
    if not valid:
        logger.info(f"Truncation of {rho_G.label or 'covariance'} at m={m} loses positivity")
    return truncated, valid
