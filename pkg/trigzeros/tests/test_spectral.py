"""Tests for covariance sequences, spectral densities and kappa."""

import math
import warnings

import numpy as np
import pytest

from src.core.errors import NotACovarianceError, TruncationWarning
from src.core.functionals import FunctionalSpec, hermite_coefficients
from src.core.spectral import (
    BARGMANN_FOCK,
    EXPONENTIAL,
    CovarianceSequence,
    closed_form_density,
    closed_form_spectral_density,
    covariance_from_density,
    density_from_finite_covariance,
    density_grid,
    evaluate_density,
    exponential_covariance,
    exponential_density_exact,
    functional_covariance,
    functional_density,
    gaussian_covariance,
    ma_density,
    truncate_covariance,
)
from src.experiments.config import MA1_KERNEL


def test_white_noise_density_is_flat():
    density = density_from_finite_covariance(CovarianceSequence.white_noise(), 256)

    assert np.allclose(density.values, 1.0, atol=1e-14)
    assert density.kappa == pytest.approx(1.0)
    assert density.mass() == pytest.approx(1.0, abs=1e-14)


def test_grid_is_symmetric():
    grid = density_grid(64)
    assert grid[0] == -math.pi
    assert np.allclose(grid[1:], -grid[1:][::-1])


def test_ma1_density_and_kappa():
    # psi(x) = 1 + 2 sqrt(0.16) cos x = 1 + 0.8 cos x
    density = ma_density(MA1_KERNEL, 1024)
    expected = 1.0 + 0.8 * np.cos(density.grid)

    assert np.allclose(density.values, expected, atol=1e-12)
    assert density.kappa == pytest.approx(0.2, abs=1e-12)
    assert density.symmetry_defect() < 1e-14


def test_bargmann_fock_matches_periodized_gaussian():
    density = density_from_finite_covariance(gaussian_covariance(), 512)
    closed = closed_form_density(BARGMANN_FOCK, density.grid)

    assert np.allclose(density.values, closed, atol=1e-10)
    assert density.mass() == pytest.approx(1.0, abs=1e-12)
    assert density.kappa > 0.0


def test_exponential_density_matches_resummed_form():
    density = density_from_finite_covariance(exponential_covariance(), 512)
    exact = exponential_density_exact(density.grid)

    assert np.allclose(density.values, exact, atol=1e-12)
    assert density.kappa == pytest.approx(math.sinh(1.0) / (math.cosh(1.0) + 1.0), rel=1e-10)


def test_exponential_closed_form_tail_correction():
    x = density_grid(32)
    assert np.allclose(closed_form_density(EXPONENTIAL, x), exponential_density_exact(x), atol=1e-6)


def test_closed_form_spectral_density_kappa():
    density = closed_form_spectral_density(BARGMANN_FOCK, 256)
    assert density.kappa == pytest.approx(float(closed_form_density(BARGMANN_FOCK, math.pi)), rel=1e-10)


def test_evaluate_density_agrees_with_grid():
    rho = exponential_covariance(20)
    density = density_from_finite_covariance(rho, 128)
    assert np.allclose(evaluate_density(rho, density.grid), density.values, atol=1e-12)


def test_covariance_recovered_from_density():
    rho = gaussian_covariance(8)
    recovered = covariance_from_density(density_from_finite_covariance(rho, 256), support=8)
    assert np.allclose(recovered.values, rho.values, atol=1e-13)


def test_sign_functional_covariance_matches_arcsine_law(sign_lag_one):
    with pytest.warns(TruncationWarning):
        expansion = hermite_coefficients(FunctionalSpec.sign(), order=41)
    rho = functional_covariance(expansion, gaussian_covariance())

    assert rho.values[0] == 1.0
    assert rho.values[1] == pytest.approx(sign_lag_one, abs=1e-8)
    arcsine = 2.0 / math.pi * np.arcsin(gaussian_covariance().values[1:4])
    assert np.allclose(rho.values[1:4], arcsine, atol=1e-8)


@pytest.mark.parametrize("order, reach", [(41, 0.93), (201, 0.99)])
def test_sign_series_tracks_arcsine(order, reach):
    # the truncated tail sum_{q > Q} c_q^2 q! rho^q is largest near |rho| = 1
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        expansion = hermite_coefficients(FunctionalSpec.sign(), order=order)
    rho = np.linspace(-reach, reach, 397)
    series = np.polynomial.polynomial.polyval(rho, expansion.weights)
    assert np.max(np.abs(series - 2.0 / math.pi * np.arcsin(rho))) <= 1e-3


def test_sign_series_at_default_order_misses_the_edges():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        expansion = hermite_coefficients(FunctionalSpec.sign(), order=41)
    series = np.polynomial.polynomial.polyval(0.99, expansion.weights)
    assert abs(series - 2.0 / math.pi * math.asin(0.99)) > 1e-2


def test_functional_density_from_gaussian_density():
    with pytest.warns(TruncationWarning):
        expansion = hermite_coefficients(FunctionalSpec.sign(), order=41)
    psi_G = density_from_finite_covariance(gaussian_covariance(), 256)
    density = functional_density(expansion, psi_G)

    assert density.mass() == pytest.approx(1.0, abs=1e-12)
    # the residual mass becomes a positive floor
    assert density.kappa >= expansion.residual_mass - 1e-9


def test_negative_density_is_rejected():
    with pytest.raises(NotACovarianceError):
        density_from_finite_covariance(CovarianceSequence(np.array([1.0, 0.9])), 256)


def test_support_must_fit_grid():
    with pytest.raises(ValueError):
        density_from_finite_covariance(exponential_covariance(40), 64)


def test_truncation_keeps_positivity_for_exponential():
    truncated, valid = truncate_covariance(exponential_covariance(), 1, 256)

    assert truncated.support == 1
    assert valid
    assert density_from_finite_covariance(truncated, 256).kappa == pytest.approx(
        1.0 - 2.0 * math.exp(-1.0), abs=1e-12
    )


def test_covariance_validation():
    CovarianceSequence(np.array([1.0, 0.5])).validate()
    with pytest.raises(NotACovarianceError):
        CovarianceSequence(np.array([2.0, 0.5])).validate()
    with pytest.raises(ValueError):
        CovarianceSequence(np.array([1.0, np.nan]))
