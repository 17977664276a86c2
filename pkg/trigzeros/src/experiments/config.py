"""
Experiment configuration schema.

A config is a JSON object with top-level keys ``kind``, ``model``, ``n``, ``reps``,
``seed``, ``out`` and ``tolerances`` plus the kind-specific blocks below. ``seed`` is
always required; there is no wall-clock default.
"""

import json
import math
from pathlib import Path
from typing import Any, Callable, Dict, List, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ..core.coeffgen import (
    CoefficientModel,
    Family,
    GaussianFunctionalModel,
    IidModel,
    InnovationLaw,
    MovingAverageModel,
)
from ..core.errors import ConfigValidationError
from ..core.functionals import FunctionalSpec, standardized_functional
from ..core.spectral import (
    CovarianceSequence,
    exponential_covariance,
    gaussian_covariance,
    ma_autocovariance,
)
from ..utils.validation_utils import ValidationUtils

ExperimentKind = Literal["expect-zeros", "clt", "small-ball", "tv-bound", "spectral", "sinc-oracle"]
EXPERIMENT_KINDS = ("expect-zeros", "clt", "small-ball", "tv-bound", "spectral", "sinc-oracle")

MA1_KERNEL = (math.sqrt(0.8), math.sqrt(0.2))

POINTWISE_FUNCTIONALS: Dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "abs": np.abs,
    "cube": lambda x: x**3,
    "tanh": np.tanh,
    "clip": lambda x: np.clip(x, -1.0, 1.0),
}


class _Block(BaseModel):
    model_config = ConfigDict(extra="forbid")


class CovarianceConfig(_Block):
    """Gaussian covariance rho_G: a named family or explicit values rho(0..K)."""

    kind: Literal["bargmann-fock", "exponential", "white", "ma", "values"] = "bargmann-fock"
    support: Optional[int] = Field(default=None, ge=0)
    values: Optional[List[float]] = None
    kernel: Optional[List[float]] = None

    @model_validator(mode="after")
    def check_payload(self) -> "CovarianceConfig":
        if self.kind == "values" and not self.values:
            raise ValueError("covariance kind 'values' needs a nonempty 'values' list")
        if self.kind == "ma" and not self.kernel:
            raise ValueError("covariance kind 'ma' needs a 'kernel'")
        return self

    def build(self) -> CovarianceSequence:
        if self.kind == "bargmann-fock":
            return gaussian_covariance(12 if self.support is None else self.support)
        if self.kind == "exponential":
            return exponential_covariance(40 if self.support is None else self.support)
        if self.kind == "white":
            return CovarianceSequence.white_noise()
        if self.kind == "ma":
            kernel = np.asarray(self.kernel, dtype=float)
            return ma_autocovariance(kernel / np.linalg.norm(kernel))
        return CovarianceSequence(np.asarray(self.values, dtype=float), label="custom")


class FunctionalConfig(_Block):
    kind: Literal["sign", "hermite", "abs", "cube", "tanh", "clip"] = "sign"
    coefficients: Optional[List[float]] = None
    eta: float = Field(default=1.0, gt=0.0)

    @model_validator(mode="after")
    def check_coefficients(self) -> "FunctionalConfig":
        if self.kind == "hermite" and not self.coefficients:
            raise ValueError("hermite functional needs 'coefficients'")
        return self

    def build(self) -> FunctionalSpec:
        if self.kind == "sign":
            return FunctionalSpec.sign(self.eta)
        if self.kind == "hermite":
            spec = FunctionalSpec.hermite_series(self.coefficients or [], self.eta)
        else:
            spec = FunctionalSpec.pointwise(POINTWISE_FUNCTIONALS[self.kind], self.kind, self.eta)
        return standardized_functional(spec)


class ModelConfig(_Block):
    """Coefficient model block."""

    type: Literal["iid", "ma", "gaussian-functional"] = "iid"
    family: Family = Family.RADEMACHER
    p: Optional[float] = Field(default=None, gt=0.0, lt=1.0)
    kernel: Optional[List[float]] = None
    covariance: Optional[CovarianceConfig] = None
    functional: Optional[FunctionalConfig] = None
    preset: Optional[str] = None

    @model_validator(mode="after")
    def check_type_fields(self) -> "ModelConfig":
        if self.type == "ma" and not self.kernel:
            raise ValueError("moving-average model needs a 'kernel'")
        if self.type == "gaussian-functional" and self.covariance is None:
            raise ValueError("gaussian-functional model needs a 'covariance'")
        if self.family == Family.TWO_POINT and self.p is None:
            raise ValueError("two-point family needs 'p'")
        return self

    @classmethod
    def from_preset(cls, name: str) -> "ModelConfig":
        if name not in MODEL_PRESETS:
            raise ValueError(f"unknown model preset {name!r}; choose from {sorted(MODEL_PRESETS)}")
        return cls.model_validate({**MODEL_PRESETS[name], "preset": name})

    def law(self) -> InnovationLaw:
        if self.family == Family.TWO_POINT:
            return InnovationLaw.two_point(float(self.p))  # type: ignore[arg-type]
        return InnovationLaw(self.family)

    def build(self) -> CoefficientModel:
        if self.type == "iid":
            return IidModel(self.law())
        if self.type == "ma":
            return MovingAverageModel.from_raw_kernel(self.kernel or [], self.law())
        functional = (self.functional or FunctionalConfig()).build()
        return GaussianFunctionalModel(self.covariance.build(), functional)  # type: ignore[union-attr]


MODEL_PRESETS: Dict[str, Dict[str, Any]] = {
    "rademacher-iid": {"type": "iid", "family": "rademacher"},
    "gaussian-iid": {"type": "iid", "family": "standard-gaussian"},
    "uniform-iid": {"type": "iid", "family": "centered-uniform-unit-variance"},
    "rademacher-ma1": {"type": "ma", "family": "rademacher", "kernel": list(MA1_KERNEL)},
    "gaussian-ma1": {"type": "ma", "family": "standard-gaussian", "kernel": list(MA1_KERNEL)},
    "sign-bargmann-fock": {
        "type": "gaussian-functional",
        "covariance": {"kind": "bargmann-fock"},
        "functional": {"kind": "sign"},
    },
    "sign-exponential": {
        "type": "gaussian-functional",
        "covariance": {"kind": "exponential"},
        "functional": {"kind": "sign"},
    },
}


class TolerancesConfig(_Block):
    universality_rel: float = Field(default=0.02, gt=0.0)
    oracle_se: float = Field(default=5.0, gt=0.0)
    sinc_se: float = Field(default=3.0, gt=0.0)
    sigma_abs: float = Field(default=0.02, gt=0.0)
    small_ball_ceiling: float = Field(default=0.01, gt=0.0)
    kolmogorov_inversions: int = Field(default=1, ge=0)
    density_mass: float = Field(default=1e-6, gt=0.0)


class SmallBallPoint(_Block):
    """One (delta, X, t) evaluation point for at-point small-ball runs."""

    delta: float = Field(gt=0.0)
    X: float
    t: float = 0.0


class SmallBallConfig(_Block):
    mode: Literal["at_point", "sup_norm"] = "sup_norm"
    delta: Optional[float] = Field(default=None, gt=0.0)
    beta: float = Field(default=0.5, gt=0.0, lt=1.0)
    X: Optional[float] = None
    t: float = 0.0
    exact: bool = False
    points: List[SmallBallPoint] = Field(default_factory=list)

    @model_validator(mode="after")
    def check_points(self) -> "SmallBallConfig":
        if self.points and self.mode != "at_point":
            raise ValueError("small_ball.points needs mode 'at_point'")
        return self


class CltConfig(_Block):
    sigma_points: List[List[float]] = Field(
        default_factory=lambda: [[0.0], [0.0, math.pi], [0.0, 1.0, 2.5]]
    )
    sigma_weights: List[List[float]] = Field(
        default_factory=lambda: [[1.0], [1.0, 1.0], [1.0, -0.5, 0.25]]
    )
    sigma_X: float = 0.7
    sigma_n: int = Field(default=8192, ge=1)

    @model_validator(mode="after")
    def check_shapes(self) -> "CltConfig":
        if len(self.sigma_points) != len(self.sigma_weights):
            raise ValueError("sigma_points and sigma_weights must have the same length")
        for points, weights in zip(self.sigma_points, self.sigma_weights):
            if len(points) != len(weights) or not points:
                raise ValueError("each sigma configuration needs matching nonempty t and xi")
        return self


class TvBoundConfig(_Block):
    covariance: CovarianceConfig = Field(default_factory=lambda: CovarianceConfig(kind="exponential"))
    m: List[int] = Field(default_factory=lambda: [2, 4, 8, 16])

    @field_validator("m")
    @classmethod
    def check_ascending(cls, v: List[int]) -> List[int]:
        errors = ValidationUtils.validate_ascending(v, "m")
        if errors or not v or min(v) < 0:
            raise ValueError("m must be a nonempty ascending list of nonnegative lags")
        return v


class SpectralConfig(_Block):
    grid_size: int = 4096
    hermite_order: int = Field(default=41, ge=1)

    @field_validator("grid_size")
    @classmethod
    def check_grid(cls, v: int) -> int:
        if not ValidationUtils.is_power_of_two(v):
            raise ValueError("grid_size must be a power of two")
        return v


class SincConfig(_Block):
    grid_size: int = Field(default=1024, ge=8, le=2047)
    epsilon: float = Field(default=0.25, gt=0.0, le=1.0)


class ExperimentConfig(_Block):
    """One experiment run."""

    kind: ExperimentKind
    seed: int = Field(ge=0)
    model: Optional[ModelConfig] = None
    n: List[int] = Field(default_factory=list)
    reps: int = Field(default=1000, ge=2)
    out: Optional[str] = None
    threads: int = Field(default=1, ge=1)
    oversample: int = Field(default=16, ge=8)
    localized: bool = False
    tolerances: TolerancesConfig = Field(default_factory=TolerancesConfig)
    small_ball: SmallBallConfig = Field(default_factory=SmallBallConfig)
    clt: CltConfig = Field(default_factory=CltConfig)
    tv_bound: TvBoundConfig = Field(default_factory=TvBoundConfig)
    spectral: SpectralConfig = Field(default_factory=SpectralConfig)
    sinc: SincConfig = Field(default_factory=SincConfig)

    @field_validator("model", mode="before")
    @classmethod
    def expand_preset(cls, v: Any) -> Any:
        if isinstance(v, str):
            if v not in MODEL_PRESETS:
                raise ValueError(f"unknown model preset {v!r}; choose from {sorted(MODEL_PRESETS)}")
            return {**MODEL_PRESETS[v], "preset": v}
        return v

    @field_validator("n")
    @classmethod
    def check_degrees(cls, v: List[int]) -> List[int]:
        errors = ValidationUtils.validate_degrees(v) if v else []
        if errors:
            raise ValueError("; ".join(errors))
        return v

    @model_validator(mode="after")
    def check_kind_requirements(self) -> "ExperimentConfig":
        needs_model = ("expect-zeros", "clt", "small-ball", "spectral")
        needs_n = ("expect-zeros", "clt", "small-ball", "tv-bound")
        if self.kind in needs_model and self.model is None:
            raise ValueError(f"experiment kind {self.kind!r} needs a 'model'")
        if self.kind in needs_n and not self.n:
            raise ValueError(f"experiment kind {self.kind!r} needs a nonempty 'n' list")
        if self.kind in ("expect-zeros", "clt") and self.reps < 100:
            raise ValueError(f"{self.kind} needs at least 100 replicates")
        return self

    def build_model(self) -> CoefficientModel:
        if self.model is None:
            raise ConfigValidationError("no model configured", ["model"])
        return self.model.build()

    def echo(self) -> Dict[str, Any]:
        """JSON-compatible copy that can be submitted again."""
        return self.model_dump(mode="json")


def parse_config(data: Dict[str, Any], overrides: Optional[Dict[str, Any]] = None) -> ExperimentConfig:
    """
    Validate a config dictionary; ``overrides`` with non-None values replace top-level keys.

    Raises:
        ConfigValidationError: with the failing field paths
    """
    merged = dict(data)
    for key, value in (overrides or {}).items():
        if value is not None:
            merged[key] = value
    try:
        return ExperimentConfig.model_validate(merged)
    except ValidationError as exc:
        errors = ValidationUtils.format_errors(exc)
        fields = [e["field"] for e in errors]
        detail = "; ".join(f"{e['field']}: {e['message']}" for e in errors)
        raise ConfigValidationError(f"invalid experiment config: {detail}", fields) from exc


def load_config(
    path: Union[str, Path],
    overrides: Optional[Dict[str, Any]] = None,
    kind: Optional[str] = None,
) -> ExperimentConfig:
    """
    Read and validate a JSON config file.

    When ``kind`` is given it fills a missing ``kind`` key; a file naming a
    different kind is rejected on field ``kind``.
    """
    config_file = Path(path)
    if not config_file.exists():
        raise ConfigValidationError(f"config file not found: {path}", ["<file>"])
    try:
        with open(config_file, "r", encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as exc:
        raise ConfigValidationError(f"config file is not valid JSON: {exc}", ["<file>"]) from exc
    if not isinstance(data, dict):
        raise ConfigValidationError("config must be a JSON object", ["<root>"])
    if kind is not None:
        declared = data.get("kind", kind)
        if declared != kind:
            raise ConfigValidationError(
                f"config declares kind {declared!r} but was run as {kind!r}", ["kind"]
            )
        data["kind"] = kind
    return parse_config(data, overrides)
