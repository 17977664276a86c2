"""
Functionals H applied to Gaussian sequences and their Hermite expansions.

Hermite polynomials use the probabilists' convention (He_1(x) = x,
He_2(x) = x^2 - 1), so that Cov(H(X_0), H(X_k)) = sum_q c_q^2 q! rho_G(k)^q.
"""

import math
import warnings
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Optional, Tuple

import numpy as np
from numpy.polynomial import hermite_e

from ..utils.logging_utils import get_logger
from .errors import DegenerateFunctionalError, InvalidModelError, TruncationWarning

logger = get_logger("trigzeros.core.functionals")

DEFAULT_QUADRATURE_ORDER = 128
DEFAULT_HERMITE_ORDER = 41
RESIDUAL_WARNING_LEVEL = 0.05
STANDARDIZATION_TOL = 1e-10


class FunctionalKind(str, Enum):
    """How the functional is represented."""

    SIGN = "sign"
    POINTWISE = "pointwise-map"
    HERMITE = "hermite-truncation"


@dataclass(frozen=True, eq=False)
class FunctionalSpec:
    """
    A real function H of one Gaussian variable, with an affine standardization.

    The represented map is ``x -> (raw(x) - shift) / scale`` where ``raw`` is the sign
    function, an arbitrary vectorized callable, or a finite Hermite series.
    """

    kind: FunctionalKind
    func: Optional[Callable[[np.ndarray], np.ndarray]] = None
    hermite: Tuple[float, ...] = ()
    eta: float = 1.0
    shift: float = 0.0
    scale: float = 1.0
    standardized: bool = False
    label: str = ""

    def __post_init__(self) -> None:
        if self.kind == FunctionalKind.POINTWISE and self.func is None:
            raise InvalidModelError("pointwise functional needs a callable")
        if self.kind == FunctionalKind.HERMITE and not self.hermite:
            raise InvalidModelError("hermite functional needs coefficients")
        if self.eta <= 0:
            raise InvalidModelError("moment exponent eta must be positive")
        if self.scale <= 0:
            raise InvalidModelError("scale must be positive")

    @classmethod
    def sign(cls, eta: float = 1.0) -> "FunctionalSpec":
        # sign(N) is already centered with unit variance
        return cls(FunctionalKind.SIGN, eta=eta, standardized=True, label="sign")

    @classmethod
    def pointwise(
        cls, func: Callable[[np.ndarray], np.ndarray], label: str = "", eta: float = 1.0
    ) -> "FunctionalSpec":
        return cls(FunctionalKind.POINTWISE, func=func, eta=eta, label=label or "pointwise")

    @classmethod
    def hermite_series(cls, coefficients, eta: float = 1.0) -> "FunctionalSpec":
        """Series sum_q c_q He_q(x) with plain (unnormalized) coefficients."""
        return cls(
            FunctionalKind.HERMITE,
            hermite=tuple(float(c) for c in coefficients),
            eta=eta,
            label="hermite",
        )

    def raw(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.kind == FunctionalKind.SIGN:
            return np.sign(x)
        if self.kind == FunctionalKind.HERMITE:
            return hermite_e.hermeval(x, np.asarray(self.hermite))
        return np.asarray(self.func(x), dtype=float)  # type: ignore[misc]

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return (self.raw(x) - self.shift) / self.scale

    def describe(self) -> dict:
        return {
            "kind": self.kind.value,
            "label": self.label,
            "hermite": list(self.hermite),
            "eta": self.eta,
            "shift": self.shift,
            "scale": self.scale,
        }


@dataclass(frozen=True, eq=False)
class HermiteExpansion:
    """
    Truncated Hermite decomposition H = sum_{q<=Q} c_q He_q.

    ``weights[q]`` holds c_q^2 q!, kept separately so large orders never form q!.
    """

    coefficients: np.ndarray
    weights: np.ndarray = field(repr=False)

    @property
    def order(self) -> int:
        return len(self.coefficients) - 1

    @property
    def captured_mass(self) -> float:
        return float(np.sum(self.weights))

    @property
    def residual_mass(self) -> float:
        return 1.0 - self.captured_mass

    def to_records(self) -> list:
        return [
            {"q": q, "c_q": float(c), "weight": float(w)}
            for q, (c, w) in enumerate(zip(self.coefficients, self.weights))
        ]


def gauss_hermite_rule(order: int) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes and probability weights for E[g(N)], N standard normal."""
    nodes, weights = hermite_e.hermegauss(order)
    return nodes, weights / math.sqrt(2.0 * math.pi)


def standardized_functional(
    spec: FunctionalSpec, quadrature_order: int = DEFAULT_QUADRATURE_ORDER
) -> FunctionalSpec:
    """
    Center and scale a functional to mean 0 and variance 1 under N(0, 1).

    Args:
        spec: Functional to standardize
        quadrature_order: Gauss-Hermite order (at least 64)

    Returns:
        Standardized copy of ``spec``
    """
    if spec.kind == FunctionalKind.SIGN:
        return replace(spec, shift=0.0, scale=1.0, standardized=True)

    nodes, weights = gauss_hermite_rule(max(64, quadrature_order))
    values = spec.raw(nodes)
    if not np.all(np.isfinite(values)):
        raise InvalidModelError(f"functional {spec.label!r} is not finite on quadrature nodes")

    mean = float(np.dot(weights, values))
    variance = float(np.dot(weights, (values - mean) ** 2))
    if not math.isfinite(variance):
        raise InvalidModelError(f"functional {spec.label!r} has no finite second moment")
    if variance <= 1e-24:
        raise DegenerateFunctionalError(f"functional {spec.label!r} is constant")

    scale = math.sqrt(variance)
    logger.debug(f"Standardized {spec.label}: mean={mean:.6g}, std={scale:.6g}")
    return replace(spec, shift=mean, scale=scale, standardized=True)


def _sign_expansion(order: int) -> HermiteExpansion:
    # E[sign(N) He_q(N)] = 2 phi(0) He_{q-1}(0) for odd q, zero otherwise.
    coefficients = np.zeros(order + 1)
    weights = np.zeros(order + 1)
    weight = 2.0 / math.pi
    for q in range(1, order + 1, 2):
        if q > 1:
            weight *= (q - 2) ** 2 / ((q - 1) * q)
        weights[q] = weight
        sign = -1.0 if (q // 2) % 2 else 1.0
        coefficients[q] = sign * math.sqrt(weight) * math.exp(-0.5 * math.lgamma(q + 1))
    return HermiteExpansion(coefficients, weights)


def _quadrature_expansion(
    spec: FunctionalSpec, order: int, quadrature_order: int
) -> HermiteExpansion:
    nodes, probs = gauss_hermite_rule(quadrature_order)
    values = spec(nodes)

    # normalized polynomials h_q = He_q / sqrt(q!), so E[H h_q]^2 = c_q^2 q!
    projections = np.zeros(order + 1)
    previous = np.zeros_like(nodes)
    current = np.ones_like(nodes)
    projections[0] = float(np.dot(probs, values * current))
    for q in range(order):
        upcoming = (nodes * current - math.sqrt(q) * previous) / math.sqrt(q + 1)
        previous, current = current, upcoming
        projections[q + 1] = float(np.dot(probs, values * current))

    log_factorials = np.array([math.lgamma(q + 1) for q in range(order + 1)])
    coefficients = projections * np.exp(-0.5 * log_factorials)
    weights = projections**2
    coefficients[np.abs(projections) < 1e-14] = 0.0
    weights[np.abs(projections) < 1e-14] = 0.0
    return HermiteExpansion(coefficients, weights)


def hermite_coefficients(
    spec: FunctionalSpec,
    order: int = DEFAULT_HERMITE_ORDER,
    quadrature_order: Optional[int] = None,
) -> HermiteExpansion:
    """
    Hermite coefficients c_q = E[H(N) He_q(N)] / q! for q <= order.

    The sign functional uses its exact coefficients; every other functional is
    projected with Gauss-Hermite quadrature of order >= max(64, 2 * order).

    Args:
        spec: Standardized functional
        order: Truncation order Q
        quadrature_order: Override for the quadrature order

    Returns:
        Truncated expansion; a TruncationWarning is issued when the residual mass
        exceeds 0.05
    """
    if order < 1:
        raise ValueError("Hermite order must be at least 1")
    if not spec.standardized:
        raise InvalidModelError("Hermite coefficients require a standardized functional")

    if spec.kind == FunctionalKind.SIGN:
        expansion = _sign_expansion(order)
    else:
        rule_order = max(64, 2 * order, quadrature_order or 0)
        expansion = _quadrature_expansion(spec, order, rule_order)

    expansion.coefficients[0] = 0.0
    expansion.weights[0] = 0.0

    residual = expansion.residual_mass
    if residual > RESIDUAL_WARNING_LEVEL:
        message = (
            f"Hermite truncation at Q={order} leaves residual mass {residual:.4f} "
            f"for {spec.label or spec.kind.value}"
        )
        logger.warning(message)
        warnings.warn(message, TruncationWarning, stacklevel=2)
    return expansion
