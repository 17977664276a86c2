"""Tests for Hermite expansions and standardization of functionals."""

import math

import numpy as np
import pytest

from src.core.errors import DegenerateFunctionalError, InvalidModelError, TruncationWarning
from src.core.functionals import (
    FunctionalKind,
    FunctionalSpec,
    gauss_hermite_rule,
    hermite_coefficients,
    standardized_functional,
)


def test_gauss_hermite_rule_integrates_moments():
    nodes, weights = gauss_hermite_rule(64)
    assert weights.sum() == pytest.approx(1.0, abs=1e-13)
    assert np.dot(weights, nodes**2) == pytest.approx(1.0, abs=1e-12)
    assert np.dot(weights, nodes**4) == pytest.approx(3.0, abs=1e-11)


def test_sign_coefficients_match_closed_form():
    with pytest.warns(TruncationWarning):
        expansion = hermite_coefficients(FunctionalSpec.sign(), order=41)

    assert expansion.coefficients[1] == pytest.approx(math.sqrt(2.0 / math.pi), rel=1e-14)
    assert expansion.coefficients[3] == pytest.approx(-math.sqrt(2.0 / math.pi) / 6.0, rel=1e-13)
    assert np.all(expansion.coefficients[0::2] == 0.0)
    assert expansion.weights[1] == pytest.approx(2.0 / math.pi, rel=1e-14)


def test_sign_residual_mass_shrinks_with_order():
    with pytest.warns(TruncationWarning):
        short = hermite_coefficients(FunctionalSpec.sign(), order=41)
    long = hermite_coefficients(FunctionalSpec.sign(), order=801)

    assert 0.05 < short.residual_mass < 0.1
    assert long.residual_mass < short.residual_mass
    assert long.residual_mass < 0.05


def test_cube_expansion_splits_variance():
    # x^3 = He_3 + 3 He_1 and Var(x^3) = 15
    spec = standardized_functional(FunctionalSpec.pointwise(lambda x: x**3, "cube"))
    expansion = hermite_coefficients(spec, order=6)

    assert spec.scale == pytest.approx(math.sqrt(15.0), rel=1e-12)
    assert expansion.weights[1] == pytest.approx(9.0 / 15.0, abs=1e-10)
    assert expansion.weights[3] == pytest.approx(6.0 / 15.0, abs=1e-10)
    assert expansion.residual_mass == pytest.approx(0.0, abs=1e-10)


def test_hermite_series_is_standardized_by_quadrature():
    spec = standardized_functional(FunctionalSpec.hermite_series([0.0, 1.0, 0.5]))
    expansion = hermite_coefficients(spec, order=4)

    assert spec.shift == pytest.approx(0.0, abs=1e-12)
    assert spec.scale == pytest.approx(math.sqrt(1.5), rel=1e-12)
    assert expansion.coefficients[1] == pytest.approx(1.0 / math.sqrt(1.5), rel=1e-10)
    assert expansion.coefficients[2] == pytest.approx(0.5 / math.sqrt(1.5), rel=1e-10)
    assert expansion.captured_mass == pytest.approx(1.0, abs=1e-10)


def test_abs_functional_is_even():
    spec = standardized_functional(FunctionalSpec.pointwise(np.abs, "abs"))
    expansion = hermite_coefficients(spec, order=20)

    assert np.allclose(expansion.coefficients[1::2], 0.0, atol=1e-12)
    assert expansion.weights[2] > 0.0
    assert spec(np.array([-1.3]))[0] == pytest.approx(spec(np.array([1.3]))[0])


def test_standardized_functional_has_unit_variance():
    spec = standardized_functional(FunctionalSpec.pointwise(np.tanh, "tanh"))
    nodes, weights = gauss_hermite_rule(128)
    values = spec(nodes)

    assert np.dot(weights, values) == pytest.approx(0.0, abs=1e-12)
    assert np.dot(weights, values**2) == pytest.approx(1.0, abs=1e-10)


def test_constant_functional_is_rejected():
    with pytest.raises(DegenerateFunctionalError):
        standardized_functional(FunctionalSpec.pointwise(lambda x: np.ones_like(x), "one"))


def test_expansion_requires_standardized_functional():
    raw = FunctionalSpec.pointwise(np.tanh, "tanh")
    with pytest.raises(InvalidModelError):
        hermite_coefficients(raw, order=4)


def test_invalid_specs_are_rejected():
    with pytest.raises(InvalidModelError):
        FunctionalSpec(FunctionalKind.POINTWISE)
    with pytest.raises(InvalidModelError):
        FunctionalSpec.sign(eta=0.0)
    with pytest.raises(ValueError):
        hermite_coefficients(FunctionalSpec.sign(), order=0)
