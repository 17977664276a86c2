"""
Pytest configuration and fixtures for the trigonometric zeros lab.
"""

import math
from typing import Any, Callable, Dict, Generator

import numpy as np
import pytest

from src.config.environments import reset_environment_config
from src.core.coeffgen import Family, GaussianFunctionalModel, IidModel, InnovationLaw, MovingAverageModel
from src.core.functionals import FunctionalSpec
from src.core.spectral import gaussian_covariance
from src.experiments.config import MA1_KERNEL


@pytest.fixture(autouse=True)
def testing_environment(monkeypatch) -> Generator[None, None, None]:
    """Run every test under the testing environment defaults."""
    monkeypatch.setenv("TRIGZEROS_ENVIRONMENT", "testing")
    reset_environment_config()
    yield
    reset_environment_config()


@pytest.fixture
def seed() -> int:
    return 20240917


@pytest.fixture
def rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


@pytest.fixture
def rademacher_iid() -> IidModel:
    return IidModel(InnovationLaw(Family.RADEMACHER))


@pytest.fixture
def gaussian_iid() -> IidModel:
    return IidModel(InnovationLaw(Family.GAUSSIAN))


@pytest.fixture
def rademacher_ma1() -> MovingAverageModel:
    return MovingAverageModel(MA1_KERNEL, InnovationLaw(Family.RADEMACHER))


@pytest.fixture
def gaussian_ma1() -> MovingAverageModel:
    return MovingAverageModel(MA1_KERNEL, InnovationLaw(Family.GAUSSIAN))


@pytest.fixture
def sign_bargmann_fock() -> GaussianFunctionalModel:
    return GaussianFunctionalModel(gaussian_covariance(), FunctionalSpec.sign())


@pytest.fixture
def sign_lag_one() -> float:
    """Cov(sign X_0, sign X_1) under rho_G(1) = exp(-1/2), by the arcsine law."""
    return 2.0 / math.pi * math.asin(math.exp(-0.5))


@pytest.fixture
def make_config(tmp_path) -> Callable[..., Dict[str, Any]]:
    """Build a raw experiment config dict writing into the test's tmp directory."""

    def _make(kind: str, **fields: Any) -> Dict[str, Any]:
        config = {"kind": kind, "seed": 7, "out": str(tmp_path / kind)}
        config.update(fields)
        return config

    return _make


# Markers for different test types
pytestmark = [
    pytest.mark.filterwarnings("ignore::DeprecationWarning"),
    pytest.mark.filterwarnings("ignore::PendingDeprecationWarning"),
]
