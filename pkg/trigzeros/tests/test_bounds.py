"""Tests for the bound shapes and the exponent ledger."""

import math

import pytest

from src.core.bounds import (
    discrete_smallball_bound,
    exponent_ledger,
    gaussian_smallball_term,
    general_smallball_bound,
    littlewood_bound,
    littlewood_delta,
    littlewood_exponents_admissible,
    rate_remainder_scale,
)
from src.core.errors import InvalidModelError


def test_ledger_at_unit_eta():
    ledger = exponent_ledger(1.0)

    assert ledger.gamma_eps == pytest.approx(1.0 / 24.0)
    assert ledger.beta_eps == pytest.approx(ledger.gamma_eps)
    assert ledger.gamma0 == pytest.approx(1.0 / 24.0)
    assert ledger.rate_exponent == pytest.approx(1.0 / 24.0)
    assert ledger.D0 == pytest.approx(48.5)
    assert set(ledger.to_dict()) == {"eta", "epsilon", "gamma_eps", "beta_eps", "gamma0", "rate_exponent", "D0"}


def test_tail_exponent_shrinks_gamma():
    plain = exponent_ledger(2.0)
    tailed = exponent_ledger(2.0, 0.5)
    assert tailed.gamma_eps < plain.gamma_eps
    assert tailed.beta_eps > tailed.gamma_eps
    assert tailed.rate_exponent > plain.rate_exponent


def test_ledger_rejects_bad_exponents():
    with pytest.raises(ValueError):
        exponent_ledger(0.0)
    with pytest.raises(ValueError):
        exponent_ledger(1.0, -0.1)


def test_gaussian_smallball_term():
    assert gaussian_smallball_term(0.1, 2.0 / math.pi) == pytest.approx(0.1)
    assert gaussian_smallball_term(10.0, 0.5) == 1.0
    with pytest.raises(ValueError):
        gaussian_smallball_term(0.1, 0.0)


@pytest.mark.parametrize("s", [0.01, 0.1, 0.5, 1.0])
def test_gaussian_smallball_term_dominates_white_noise(s):
    # white noise has psi = 1, so S_n(t) is standard normal for Gaussian coefficients
    exact = math.erf(s / math.sqrt(2.0))
    term = gaussian_smallball_term(s, 1.0)
    assert term == pytest.approx(min(1.0, 2.0 * s / math.sqrt(2.0 * math.pi)))
    assert exact <= term


def test_rate_remainder_scale():
    assert rate_remainder_scale(16, 1.0) == pytest.approx(16.0 ** (-1.0 / 24.0))


def test_discrete_smallball_bound():
    assert discrete_smallball_bound(4, 1, 2.0, 0.5) == pytest.approx(0.125)
    assert discrete_smallball_bound(1, 10, 4.0, 0.5) == 1.0
    with pytest.raises(ValueError):
        discrete_smallball_bound(4, 1, 2.0, 1.0)
    with pytest.raises(ValueError):
        discrete_smallball_bound(4, 1, 0.5, 0.5)


def test_general_smallball_bound():
    assert general_smallball_bound(100, 0.0, 4, 1, 0.5) == pytest.approx(0.5)
    assert general_smallball_bound(100, 1.0, 4, 1, 0.5) == 1.0
    with pytest.raises(InvalidModelError):
        general_smallball_bound(100, 0.01, 4, 1, 1.0)
    with pytest.raises(ValueError):
        general_smallball_bound(100, 0.01, 0, 1, 0.5)


def test_littlewood_quantities():
    assert littlewood_delta(8, 0.5) == pytest.approx(0.5)
    assert littlewood_delta(100, 0.5) == pytest.approx(1.0 / math.factorial(10))
    assert littlewood_exponents_admissible(0.1, 0.5, 0.1)
    assert not littlewood_exponents_admissible(0.2, 0.5, 0.1)
    assert littlewood_bound(16, 0.5, 0.25) == pytest.approx(0.25)
    with pytest.raises(ValueError):
        littlewood_delta(8, 1.0)
