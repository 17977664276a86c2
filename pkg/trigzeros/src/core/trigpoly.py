"""
Trigonometric polynomials f(t) = sum_{k=1}^n a_k cos(kt) + b_k sin(kt) and the
local field S_n(t) = f(X + t/n) / sqrt(n).
"""

import math
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from ..utils.logging_utils import get_logger
from .coeffgen import CoefficientSample
from .errors import AliasingError

logger = get_logger("trigzeros.core.trigpoly")

DEFAULT_OVERSAMPLE = 16
TAYLOR_TOL = 1e-18
MAX_TAYLOR_ORDER = 24


def is_power_of_two(value: int) -> bool:
    return value > 0 and value & (value - 1) == 0


def next_power_of_two(value: float) -> int:
    return 1 << max(0, int(math.ceil(math.log2(max(value, 1.0)))))


@dataclass(frozen=True, eq=False)
class TrigPolynomial:
    """Cosine coefficients ``a`` and sine coefficients ``b`` for k = 1..n."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self) -> None:
        a = np.atleast_1d(np.asarray(self.a, dtype=float))
        b = np.atleast_1d(np.asarray(self.b, dtype=float))
        if a.ndim != 1 or a.shape != b.shape or a.size == 0:
            raise ValueError("coefficient vectors must be nonempty and of equal length")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise ValueError("coefficients must be finite")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @classmethod
    def from_sample(cls, sample: CoefficientSample) -> "TrigPolynomial":
        return cls(sample.a, sample.b)

    @classmethod
    def monomial(cls, k: int, kind: str = "cos", degree: int = 0, amplitude: float = 1.0):
        """amplitude * cos(kt) or sin(kt), padded to ``degree`` if larger than k."""
        n = max(k, degree)
        a, b = np.zeros(n), np.zeros(n)
        (a if kind == "cos" else b)[k - 1] = amplitude
        return cls(a, b)

    @property
    def degree(self) -> int:
        return len(self.a)

    @property
    def bandwidth(self) -> float:
        return float(self.degree)

    @property
    def coefficient_norm(self) -> float:
        return float(math.sqrt(np.dot(self.a, self.a) + np.dot(self.b, self.b)))

    def __add__(self, other: "TrigPolynomial") -> "TrigPolynomial":
        n = max(self.degree, other.degree)
        a, b = np.zeros(n), np.zeros(n)
        a[: self.degree] += self.a
        b[: self.degree] += self.b
        a[: other.degree] += other.a
        b[: other.degree] += other.b
        return TrigPolynomial(a, b)

    def __call__(self, t) -> np.ndarray:
        return evaluate_at(self, t)


def _spectrum(p: TrigPolynomial, size: int) -> np.ndarray:
    spectrum = np.zeros(size // 2 + 1, dtype=complex)
    spectrum[1: p.degree + 1] = 0.5 * size * (p.a - 1j * p.b)
    return spectrum


def _check_grid(p: TrigPolynomial, size: int) -> None:
    if size < 2 * p.degree + 2:
        raise AliasingError(f"grid of {size} points aliases a degree-{p.degree} polynomial")
    if not is_power_of_two(size):
        raise ValueError(f"grid size {size} is not a power of two")


def evaluate_on_grid(p: TrigPolynomial, size: int) -> np.ndarray:
    """
    Values f(2 pi j / N), j = 0..N-1, by one inverse real FFT.

    Args:
        p: Polynomial of degree n
        size: Grid size N, a power of two with N >= 2n + 2

    Returns:
        Grid values
    """
    _check_grid(p, size)
    return np.fft.irfft(_spectrum(p, size), n=size)


def evaluate_at(p: TrigPolynomial, t) -> np.ndarray:
    """Clenshaw evaluation at arbitrary points (vectorized over ``t``)."""
    t = np.asarray(t, dtype=float)
    cos_t = np.cos(t)
    two_cos = 2.0 * cos_t
    u1_a = np.zeros(t.shape)
    u2_a = np.zeros(t.shape)
    u1_b = np.zeros(t.shape)
    u2_b = np.zeros(t.shape)
    for k in range(p.degree - 1, -1, -1):
        u1_a, u2_a = p.a[k] + two_cos * u1_a - u2_a, u1_a
        u1_b, u2_b = p.b[k] + two_cos * u1_b - u2_b, u1_b
    return u1_a * cos_t - u2_a + u1_b * np.sin(t)


def derivative(p: TrigPolynomial, order: int = 1) -> TrigPolynomial:
    """Apply (a_k, b_k) -> (k b_k, -k a_k) ``order`` times."""
    if order < 0:
        raise ValueError("derivative order must be nonnegative")
    k = np.arange(1, p.degree + 1, dtype=float)
    a, b = p.a.copy(), p.b.copy()
    for _ in range(order):
        a, b = k * b, -k * a
    return TrigPolynomial(a, b)


def sobolev_norm_sq(p: TrigPolynomial, order: int) -> float:
    """
    E_X ||S_n^{(l)}||_2^2 = (1/2n) sum_k (k/n)^{2l} (a_k^2 + b_k^2), for the local field
    built from the coefficients of ``p``.
    """
    if order < 0:
        raise ValueError("Sobolev order must be nonnegative")
    n = p.degree
    ratio = np.arange(1, n + 1) / n
    return float(np.sum(ratio ** (2 * order) * (p.a**2 + p.b**2)) / (2.0 * n))


def sup_norm_bounds(p: TrigPolynomial, oversample: int = DEFAULT_OVERSAMPLE) -> Tuple[float, float]:
    """
    Grid maximum of |f| and the Bernstein upper bound max / (1 - pi n / N).
    """
    size = max(1024, next_power_of_two(oversample * p.degree))
    grid_max = float(np.max(np.abs(evaluate_on_grid(p, size))))
    return grid_max, grid_max / (1.0 - math.pi * p.degree / size)


def tightness_exact(n: int, s: float, t: float, derivative: bool = False) -> float:
    """
    E_X E|S_n(t) - S_n(s)|^2 = (2/n) sum_k w_k (1 - cos(k (t - s) / n)), with w_k = 1,
    or w_k = (k/n)^2 for the increments of S_n'.
    """
    k = np.arange(1, n + 1, dtype=float)
    weights = (k / n) ** 2 if derivative else np.ones(n)
    return float(2.0 / n * np.sum(weights * (1.0 - np.cos(k * (t - s) / n))))


@dataclass(frozen=True, eq=False)
class LocalFieldWindow:
    """S(t) = f(X + t/n) / sqrt(n), evaluated through coefficients rotated by kX."""

    base: TrigPolynomial
    X: float
    rotated: TrigPolynomial = field(repr=False)

    @property
    def n(self) -> int:
        return self.base.degree

    @property
    def bandwidth(self) -> float:
        return 1.0

    @property
    def coefficient_norm(self) -> float:
        return self.base.coefficient_norm / math.sqrt(self.n)

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return evaluate_at(self.rotated, t / self.n) / math.sqrt(self.n)

    def derivative(self) -> "LocalFieldWindow":
        """Window of S_n': coefficients (k b_k / n, -k a_k / n)."""
        d = derivative(self.base, 1)
        return local_field(TrigPolynomial(d.a / self.n, d.b / self.n), self.X)


def local_field(p: TrigPolynomial, X: float, n: int = 0) -> LocalFieldWindow:
    """
    Local field window of ``p`` at base point X.

    Uses a cos(kX + u) + b sin(kX + u) = A cos(u) + B sin(u) with
    A = a cos(kX) + b sin(kX) and B = b cos(kX) - a sin(kX).
    """
    if n and n != p.degree:
        raise ValueError(f"window degree {n} does not match polynomial degree {p.degree}")
    k = np.arange(1, p.degree + 1, dtype=float)
    cos_kx, sin_kx = np.cos(k * X), np.sin(k * X)
    rotated = TrigPolynomial(p.a * cos_kx + p.b * sin_kx, p.b * cos_kx - p.a * sin_kx)
    return LocalFieldWindow(p, float(X), rotated)


class GridTaylorEvaluator:
    """
    Taylor jets of f on the FFT grid, for fast evaluation anywhere on the circle.

    ``jets[p, j] = f^{(p)}(t_j) h^p / p!`` with h = 2 pi / N; a point t is evaluated
    from its nearest node, so |t - t_j| <= h / 2 and the series converges like
    (pi / oversample)^p / p!.
    """

    def __init__(self, p: TrigPolynomial, size: int):
        _check_grid(p, size)
        ratio = math.pi * p.degree / size
        order = 1
        while ratio**order / math.factorial(order) > TAYLOR_TOL and order < MAX_TAYLOR_ORDER:
            order += 1

        self.size = size
        self.step = 2.0 * math.pi / size
        self.order = order
        k = np.arange(p.degree + 1, dtype=float)
        base = _spectrum(p, size)
        factors = np.ones(p.degree + 1, dtype=complex)
        spectra = np.empty((order + 1, size // 2 + 1), dtype=complex)
        for q in range(order + 1):
            if q > 0:
                factors = factors * (1j * k * self.step) / q
            spectra[q] = 0.0
            spectra[q, : p.degree + 1] = base[: p.degree + 1] * factors
        self.jets = np.fft.irfft(spectra, n=size, axis=-1)
        logger.debug(f"Taylor evaluator: N={size}, order={order}")

    @property
    def values(self) -> np.ndarray:
        return self.jets[0]

    @property
    def derivative_values(self) -> np.ndarray:
        return self.jets[1] / self.step

    def _locate(self, t: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        position = np.asarray(t, dtype=float) / self.step
        nearest = np.rint(position)
        return nearest.astype(np.int64) % self.size, position - nearest

    def __call__(self, t) -> np.ndarray:
        idx, s = self._locate(t)
        out = self.jets[self.order, idx]
        for q in range(self.order - 1, -1, -1):
            out = out * s + self.jets[q, idx]
        return out

    def derivative(self, t) -> np.ndarray:
        idx, s = self._locate(t)
        out = self.order * self.jets[self.order, idx]
        for q in range(self.order - 1, 0, -1):
            out = out * s + q * self.jets[q, idx]
        return out / self.step
