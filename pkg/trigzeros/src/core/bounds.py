"""
Closed-form shapes of the anti-concentration bounds and the exponent bookkeeping of
the universality argument. Constants in these bounds are not known; the functions
return the shapes with explicit constants supplied by the caller.
"""

import math
from dataclasses import asdict, dataclass
from typing import Dict

from .errors import InvalidModelError


@dataclass(frozen=True)
class ExponentLedger:
    eta: float
    epsilon: float
    gamma_eps: float
    beta_eps: float
    gamma0: float
    rate_exponent: float
    D0: float

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


def exponent_ledger(eta: float, epsilon: float = 0.0) -> ExponentLedger:
    """
    Exponents as functions of the moment exponent eta and the tail exponent epsilon.

    gamma_eps = eta / (2 (5 + 7 eta + 3 eps (4 + 6 eta))),
    beta_eps = (1 + 3 eps) / (1 + 2 eps) * gamma_eps,
    gamma0 = eta / (2 (5 + 7 eta)),
    rate = (1 + eta) / (4 + 6 eta) * (eta / (2 (1 + eta)) - gamma_eps),
    D0 = 57/2 + 20 / eta.
    """
    if eta <= 0:
        raise ValueError("eta must be positive")
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    gamma_eps = eta / (2.0 * (5.0 + 7.0 * eta + 3.0 * epsilon * (4.0 + 6.0 * eta)))
    beta_eps = (1.0 + 3.0 * epsilon) / (1.0 + 2.0 * epsilon) * gamma_eps
    gamma0 = eta / (2.0 * (5.0 + 7.0 * eta))
    rate = (1.0 + eta) / (4.0 + 6.0 * eta) * (eta / (2.0 * (1.0 + eta)) - gamma_eps)
    return ExponentLedger(
        eta=eta,
        epsilon=epsilon,
        gamma_eps=gamma_eps,
        beta_eps=beta_eps,
        gamma0=gamma0,
        rate_exponent=rate,
        D0=28.5 + 20.0 / eta,
    )


def gaussian_smallball_term(s: float, kappa: float) -> float:
    """
    min(1, s sqrt(2 / (pi kappa))), the Gaussian part of the uniform small-ball estimate.

    Densities here follow rho(k) = (1/2pi) int e^{ikx} psi(x) dx, so white noise has
    psi = 1 and Var S_n(t) >= kappa. The term is then the normal density bound
    P(|N(0, kappa)| <= s) <= 2s / sqrt(2 pi kappa). With psi normalized to
    integrate to 1 the floor becomes kappa / 2pi and the term reads s / (pi sqrt(kappa)),
    half of the looser 2s / (pi sqrt(kappa)) written for that normalization.
    """
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    if s < 0:
        raise ValueError("s must be nonnegative")
    return min(1.0, s * math.sqrt(2.0 / (math.pi * kappa)))


def rate_remainder_scale(n: int, eta: float, epsilon: float = 0.0) -> float:
    """n^{-rate_exponent}; the unknown constant in front is not included."""
    return float(n) ** (-exponent_ledger(eta, epsilon).rate_exponent)


def discrete_smallball_bound(N: int, m: int, A: float, c: float) -> float:
    """c^N A^m for coefficients with finitely many atoms."""
    if not 0.0 < c < 1.0:
        raise ValueError("c must lie in (0, 1)")
    if A < 1.0:
        raise ValueError("A must be at least 1")
    return min(1.0, math.exp(N * math.log(c) + m * math.log(A)))


def general_smallball_bound(
    n: int, delta: float, N: int, m: int, kappa: float, C: float = 1.0
) -> float:
    """min(1, (C (n delta)^{1/(4(N+m))} + kappa^{floor(N/(m+1))})^{1/2})."""
    if N < 1 or m < 0:
        raise ValueError("N must be positive and m nonnegative")
    if not 0.0 <= kappa < 1.0:
        raise InvalidModelError("separation constant kappa must lie in [0, 1)")
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    scale = C * (n * delta) ** (1.0 / (4.0 * (N + m)))
    return min(1.0, math.sqrt(scale + kappa ** (N // (m + 1))))


def littlewood_delta(n: int, beta: float) -> float:
    """1 / floor(n^beta)!, computed in log space."""
    if not 0.0 < beta < 1.0:
        raise ValueError("beta must lie in (0, 1)")
    return math.exp(-math.lgamma(math.floor(n**beta) + 1))


def littlewood_exponents_admissible(alpha: float, beta: float, gamma: float) -> bool:
    return alpha > 0 and gamma > 0 and 0.0 < 2.0 * (alpha + gamma) < beta < 1.0


def littlewood_bound(n: int, alpha: float, gamma: float) -> float:
    """2^{n^gamma - n^alpha}."""
    return 2.0 ** (n**gamma - n**alpha)
