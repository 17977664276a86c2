"""Tests for the Kac-Rice oracle, the sinc limit process and sigma_n^2."""

import math

import numpy as np
import pytest

from src.core.errors import DegenerateDensityError, ResourceLimitError
from src.core.oracle import (
    SINC_ZERO_INTENSITY,
    KacRiceSpec,
    clear_sinc_cache,
    iid_expected_zeros,
    kac_rice_expected_zeros,
    kac_rice_from_model,
    kac_rice_moments,
    limit_variance,
    sample_sinc_paths,
    sample_sinc_process,
    sigma_n_sq,
    sinc_covariance,
    sinc_zero_counts,
)
from src.core.spectral import CovarianceSequence, exponential_covariance, ma_autocovariance
from src.experiments.config import MA1_KERNEL
from src.utils.rng import RngStream, stream_range


def test_iid_closed_form():
    assert iid_expected_zeros(1) == pytest.approx(2.0)
    assert iid_expected_zeros(256) / 256 == pytest.approx(2.0 / math.sqrt(3.0), rel=0.01)


@pytest.mark.parametrize("n", [1, 5, 32])
def test_kac_rice_white_noise_matches_closed_form(n):
    value = kac_rice_expected_zeros(KacRiceSpec(CovarianceSequence.white_noise(), n))
    assert value == pytest.approx(iid_expected_zeros(n), rel=1e-8)


def test_kac_rice_moments_for_white_noise():
    v0, v1, v2 = kac_rice_moments(CovarianceSequence.white_noise(), 10, np.array([0.3, 2.0]))
    assert np.allclose(v0, 10.0)
    assert np.allclose(v1, 0.0)
    assert np.allclose(v2, 10 * 11 * 21 / 6)


def test_kac_rice_moments_match_direct_sums():
    rho = exponential_covariance(40)
    n, t = 12, 0.77
    k = np.arange(1, n + 1)
    cov = rho.at(np.subtract.outer(k, k))
    phase = np.cos(np.subtract.outer(k, k) * t)
    v0, v1, v2 = kac_rice_moments(rho, n, t)

    assert float(v0) == pytest.approx(np.sum(cov * phase), rel=1e-12)
    assert float(v2) == pytest.approx(np.sum(cov * phase * np.outer(k, k)), rel=1e-12)


def test_kac_rice_for_ma_model_approaches_sinc_intensity():
    n = 256
    value = kac_rice_expected_zeros(KacRiceSpec(ma_autocovariance(MA1_KERNEL), n))
    assert value / n == pytest.approx(SINC_ZERO_INTENSITY, rel=0.02)


def test_kac_rice_from_model_handles_non_gaussian():
    assert kac_rice_from_model(None, 10) is None
    assert kac_rice_from_model(CovarianceSequence.white_noise(), 1) == pytest.approx(2.0)


def test_kac_rice_rejects_invalid_inputs():
    with pytest.raises(ValueError):
        KacRiceSpec(CovarianceSequence.white_noise(), 0)
    with pytest.raises(ValueError):
        KacRiceSpec(CovarianceSequence(np.array([1.5])), 4)


def test_sinc_covariance_diagonal_and_symmetry():
    grid = np.linspace(0.0, 3.0, 7)
    matrix = sinc_covariance(grid)
    assert np.allclose(np.diag(matrix), 1.0)
    assert np.allclose(matrix, matrix.T)
    assert matrix[0, 1] == pytest.approx(math.sin(0.5) / 0.5)


def test_sinc_paths_are_reproducible_and_have_unit_variance():
    clear_sinc_cache()
    grid = np.linspace(0.0, 2.0 * math.pi, 65)
    first = sample_sinc_process(grid, RngStream(4, 2))
    again = sample_sinc_paths(grid, [RngStream(4, 2)])[0]
    assert np.array_equal(first, again)

    paths = sample_sinc_paths(grid, stream_range(4, 0, 8000))
    assert np.mean(paths[:, 10] ** 2) == pytest.approx(1.0, abs=0.07)
    assert np.mean(paths[:, 10] * paths[:, 20]) == pytest.approx(
        math.sin(grid[20] - grid[10]) / (grid[20] - grid[10]), abs=0.07
    )


@pytest.mark.slow
def test_sinc_zero_intensity():
    counts = sinc_zero_counts(grid_size=256, reps=2000, seed=9)
    mean = counts.mean()
    stderr = counts.std(ddof=1) / math.sqrt(len(counts))
    assert abs(mean - SINC_ZERO_INTENSITY) <= 4.0 * stderr


def test_sinc_counts_do_not_depend_on_threads():
    serial = sinc_zero_counts(grid_size=128, reps=300, seed=2, max_workers=1, batch_size=50)
    threaded = sinc_zero_counts(grid_size=128, reps=300, seed=2, max_workers=4, batch_size=50)
    assert np.array_equal(serial, threaded)


def test_sinc_grid_limit():
    with pytest.raises(ResourceLimitError):
        sinc_zero_counts(grid_size=2048, reps=2)


def test_sigma_white_noise_single_point_is_one():
    assert sigma_n_sq(0.3, [0.0], [1.0], CovarianceSequence.white_noise(), 64) == pytest.approx(1.0)


def test_sigma_matches_direct_quadratic_form():
    rho = ma_autocovariance(MA1_KERNEL)
    X, n = 0.7, 20
    t, xi = np.array([0.0, 1.0]), np.array([1.0, -0.5])
    k = np.arange(1, n + 1)
    angles = np.outer(k, X + t / n)
    U, V = np.cos(angles) @ xi, np.sin(angles) @ xi
    cov = rho.at(np.subtract.outer(k, k))
    psi = 1.0 + 2.0 * rho.values[1] * math.cos(X)
    expected = (U @ cov @ U + V @ cov @ V) / n / psi

    assert sigma_n_sq(X, t, xi, rho, n) == pytest.approx(expected, rel=1e-9)


def test_sigma_converges_to_sinc_limit():
    rho = exponential_covariance()
    t, xi = [0.0, 1.0, 2.5], [1.0, -0.5, 0.25]
    target = limit_variance(t, xi)
    assert abs(sigma_n_sq(0.7, t, xi, rho, 8192) - target) < 0.02


@pytest.mark.parametrize(
    "t, xi",
    [([0.0], [1.0]), ([0.0, math.pi], [1.0, 1.0]), ([0.0, 1.0, 2.5], [1.0, -0.5, 0.25])],
)
@pytest.mark.parametrize("rho", [ma_autocovariance(MA1_KERNEL), exponential_covariance()])
def test_sigma_error_shrinks_along_degrees(rho, t, xi):
    target = limit_variance(t, xi)
    errors = [abs(sigma_n_sq(0.7, t, xi, rho, 2**p) - target) for p in range(8, 14)]
    for earlier, later in zip(errors, errors[1:]):
        assert later <= 1.1 * earlier
    assert errors[-1] < 0.02


def test_sigma_rejects_vanishing_density():
    # psi(x) = 1 + cos x vanishes at pi
    rho = CovarianceSequence(np.array([1.0, 0.5]))
    with pytest.raises(DegenerateDensityError):
        sigma_n_sq(math.pi, [0.0], [1.0], rho, 32)
