"""Experiment configs, runner and reports."""

from .config import ExperimentConfig, load_config, parse_config
from .report import ExperimentReport, Verdict, load_report
from .runner import ExperimentRunner

__all__ = [
    "ExperimentConfig",
    "ExperimentReport",
    "ExperimentRunner",
    "Verdict",
    "load_config",
    "load_report",
    "parse_config",
]
