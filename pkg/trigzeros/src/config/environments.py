"""
Environment-specific defaults for the experiment lab.
"""

import os
from enum import Enum
from typing import Any, Dict, Optional


class Environment(str, Enum):
    """Environment types."""

    DEVELOPMENT = "development"
    TESTING = "testing"
    PRODUCTION = "production"


def get_environment() -> Environment:
    """
    Get the current environment from ``TRIGZEROS_ENVIRONMENT``.

    Returns:
        Current environment (defaults to DEVELOPMENT)
    """
    env_name = os.getenv("TRIGZEROS_ENVIRONMENT", "development").lower()

    try:
        return Environment(env_name)
    except ValueError:
        return Environment.DEVELOPMENT


class EnvironmentConfig:
    """Per-environment defaults merged into Settings."""

    def __init__(self, environment: Environment):
        self.environment = environment
        self._config = self._load_environment_config()

    def _load_environment_config(self) -> Dict[str, Any]:
        base_config = {
            "log_level": "INFO",
            "debug": False,
            "max_workers": 4,
            "performance_sampling": True,
        }

        if self.environment == Environment.DEVELOPMENT:
            return {**base_config, "log_level": "DEBUG", "debug": True, "max_workers": 2}

        if self.environment == Environment.TESTING:
            return {
                **base_config,
                "log_level": "WARNING",
                "max_workers": 1,
                "performance_sampling": False,
            }

        if self.environment == Environment.PRODUCTION:
            return {**base_config, "log_level": "WARNING", "max_workers": os.cpu_count() or 4}

        return base_config

    def get(self, key: str, default: Any = None) -> Any:
        return self._config.get(key, default)


_environment_config: Optional[EnvironmentConfig] = None


def get_environment_config() -> EnvironmentConfig:
    """
    Get the global environment configuration instance.

    Returns:
        Environment configuration instance
    """
    global _environment_config

    if _environment_config is None:
        _environment_config = EnvironmentConfig(get_environment())

    return _environment_config


def reset_environment_config() -> None:
    """Reset the global environment configuration (mainly for testing)."""
    global _environment_config
    _environment_config = None
