"""
Logging setup and structured logging helpers for the trigzeros laboratory.
"""

import logging
import logging.config
import os
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Optional

import yaml

DEFAULT_CONFIG = Path(__file__).resolve().parents[2] / "configs" / "logging.yaml"


def setup_logging(
    config_path: Optional[str] = None,
    default_level: int = logging.INFO,
    env_key: str = "TRIGZEROS_LOG_CFG",
) -> None:
    """
    Setup logging configuration.

    Args:
        config_path: Path to logging configuration file
        default_level: Default logging level if config file not found
        env_key: Environment variable name for config path override
    """
    logs_dir = Path("logs")
    logs_dir.mkdir(exist_ok=True)

    if config_path is None:
        config_path = os.getenv(env_key, None)

    path = Path(config_path) if config_path is not None else DEFAULT_CONFIG

    if path.exists() and path.suffix.lower() in (".yaml", ".yml"):
        with open(path, "r") as f:
            config = yaml.safe_load(f.read())
        logging.config.dictConfig(config)
    else:
        logging.basicConfig(
            level=default_level,
            format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
            datefmt="%Y-%m-%d %H:%M:%S",
            handlers=[
                logging.StreamHandler(),
                logging.FileHandler(logs_dir / "trigzeros.log"),
            ],
        )
        logging.warning(f"Logging config file not found at {path}. Using basic configuration.")


def get_logger(name: str) -> logging.Logger:
    """
    Get a logger with the specified name.

    Args:
        name: Logger name

    Returns:
        Logger instance
    """
    return logging.getLogger(name)


def log_experiment_event(
    kind: str, status: str, details: Optional[Dict[str, Any]] = None
) -> None:
    """
    Log an experiment lifecycle event (started, completed, failed).

    Args:
        kind: Experiment kind
        status: Lifecycle status
        details: Seeds, sizes, verdict summaries
    """
    logger = get_logger("trigzeros.experiments")

    log_data = {
        "timestamp": datetime.now().isoformat(),
        "experiment": kind,
        "status": status,
        "details": details or {},
    }

    if status == "failed":
        logger.error(f"Experiment {kind} - {status}", extra=log_data)
    else:
        logger.info(f"Experiment {kind} - {status}", extra=log_data)


def log_performance_metrics(component: str, metrics: Dict[str, Any]) -> None:
    """
    Log performance metrics.

    Args:
        component: Monitored session name
        metrics: Performance metrics dictionary
    """
    logger = get_logger("trigzeros.performance")

    log_data = {
        "timestamp": datetime.now().isoformat(),
        "component": component,
        "metrics": metrics,
    }

    logger.info(f"Performance metrics for {component}", extra=log_data)


class StructuredLogger:
    """Structured logger for machine-readable run logs."""

    def __init__(self, name: str):
        self.logger = get_logger(name)
        self.name = name

    def log_event(
        self,
        event_type: str,
        message: str,
        level: int = logging.INFO,
        **kwargs: Any,
    ) -> None:
        """
        Log a structured event.

        Args:
            event_type: Type of event
            message: Log message
            level: Log level
            **kwargs: Additional structured data
        """
        extra_data = {
            "timestamp": datetime.now().isoformat(),
            "event_type": event_type,
            "logger_name": self.name,
            **kwargs,
        }

        self.logger.log(level, message, extra=extra_data)

    def log_batch(self, experiment: str, n: int, replicates: int, **kwargs: Any) -> None:
        """Log completion of one replicate batch."""
        self.log_event(
            "batch",
            f"{experiment}: n={n} finished {replicates} replicates",
            experiment=experiment,
            degree=n,
            replicates=replicates,
            **kwargs,
        )

    def log_error(self, error: Exception, context: Optional[Dict[str, Any]] = None) -> None:
        """
        Log an error with context.

        Args:
            error: Exception that occurred
            context: Additional context about the error
        """
        self.log_event(
            "error",
            f"Error occurred: {str(error)}",
            level=logging.ERROR,
            error_type=type(error).__name__,
            error_message=str(error),
            context=context or {},
        )


def get_structured_logger(name: str) -> StructuredLogger:
    """Get a structured logger instance."""
    return StructuredLogger(name)
