"""
Process-level settings for the experiment lab.

Experiment parameters live in per-run JSON configs (see ``src.experiments.config``);
these settings only cover logging, threading, output location and numerical defaults.
"""

import json
from pathlib import Path
from typing import Optional

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from ..utils.validation_utils import ValidationUtils
from .environments import Environment, get_environment, get_environment_config


class Settings(BaseSettings):
    """Main application settings, read from ``TRIGZEROS_*`` variables and ``.env``."""

    model_config = SettingsConfigDict(
        env_prefix="TRIGZEROS_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        validate_assignment=True,
        extra="ignore",
    )

    # Environment
    environment: Environment = Field(default_factory=get_environment)
    debug: bool = Field(default=False, description="Debug mode")

    # Logging
    log_level: str = Field(default="INFO", description="Logging level")
    log_file: Optional[str] = Field(default="logs/trigzeros.log", description="Log file path")
    log_config: Optional[str] = Field(default=None, description="Path to a logging YAML file")

    # Execution
    max_workers: int = Field(default=4, ge=1, description="Replicate worker threads")
    output_dir: str = Field(default="results", description="Default report directory")
    monitor_interval: float = Field(
        default=1.0, gt=0.0, description="Seconds between psutil samples"
    )

    # Numerical defaults
    default_oversample: int = Field(default=16, ge=8, description="Zero-counting oversampling")
    grid_size: int = Field(default=4096, description="Spectral density grid size")
    hermite_order: int = Field(default=41, ge=1, description="Hermite truncation order")

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        level = v.upper()
        if level not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            raise ValueError(f"Unknown log level: {v}")
        return level

    @field_validator("grid_size")
    @classmethod
    def validate_grid_size(cls, v: int) -> int:
        if not ValidationUtils.is_power_of_two(v) or v < 64:
            raise ValueError("grid_size must be a power of two and at least 64")
        return v

    def __init__(self, **kwargs):
        """Initialize settings, filling unset fields from the environment defaults."""
        super().__init__(**kwargs)

        env_config = get_environment_config()
        for key in ("log_level", "debug", "max_workers"):
            if key not in self.model_fields_set and env_config.get(key) is not None:
                setattr(self, key, env_config.get(key))

    @property
    def performance_sampling(self) -> bool:
        return bool(get_environment_config().get("performance_sampling", True))

    @classmethod
    def from_file(cls, config_path: str) -> "Settings":
        """
        Load settings from a JSON file.

        Args:
            config_path: Path to configuration file

        Returns:
            Settings instance
        """
        config_file = Path(config_path)

        if not config_file.exists():
            raise FileNotFoundError(f"Configuration file not found: {config_path}")

        if config_file.suffix.lower() != ".json":
            raise ValueError("Only JSON configuration files are supported")

        with open(config_file, "r") as f:
            config_data = json.load(f)

        return cls(**config_data)

    def to_file(self, config_path: str) -> None:
        """
        Save settings to a JSON file.

        Args:
            config_path: Path to save configuration
        """
        config_file = Path(config_path)
        config_file.parent.mkdir(parents=True, exist_ok=True)

        with open(config_file, "w") as f:
            json.dump(self.model_dump(mode="json"), f, indent=2)

    def is_development(self) -> bool:
        return self.environment == Environment.DEVELOPMENT

    def is_production(self) -> bool:
        return self.environment == Environment.PRODUCTION
