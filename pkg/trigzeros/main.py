#!/usr/bin/env python3
"""
Command-line entry point for the trigonometric zeros laboratory.

Each experiment kind is a subcommand reading a JSON config; ``report`` prints
the verdicts of a previously written report.

Exit codes: 0 all verdicts passed, 1 a verdict failed or the engine errored,
2 the config was invalid.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from src.config.settings import Settings
from src.core.errors import ConfigValidationError
from src.experiments.config import EXPERIMENT_KINDS, ExperimentConfig, load_config
from src.experiments.report import (
    ExperimentReport,
    load_report,
    report_exit_code,
    verdict_table,
)
from src.experiments.runner import ExperimentRunner
from src.utils.logging_utils import get_logger, setup_logging

EXIT_PASSED = 0
EXIT_FAILED = 1
EXIT_INVALID_CONFIG = 2


class ExperimentOrchestrator:
    """Loads configs, runs experiments and writes their reports."""

    def __init__(self, settings: Optional[Settings] = None):
        self.settings = settings or Settings()
        self.logger = get_logger("orchestrator")
        self.runner = ExperimentRunner(self.settings)

    def output_dir(self, config: ExperimentConfig) -> Path:
        if config.out:
            return Path(config.out)
        return Path(self.settings.output_dir) / f"{config.kind}-seed{config.seed}"

    def run_experiment(self, config: ExperimentConfig) -> ExperimentReport:
        """Run one config and write its artifacts."""
        self.logger.info(f"Running {config.kind} with seed {config.seed}")
        report = self.runner.run(config)
        report.write(self.output_dir(config))
        return report

    def run_file(self, kind: str, path: str, overrides: Dict[str, Any]) -> ExperimentReport:
        config = load_config(path, overrides, kind=kind)
        return self.run_experiment(config)


def print_verdicts(verdicts: List[Dict[str, Any]], passed: bool) -> None:
    table = verdict_table({"verdicts": verdicts})
    if table.empty:
        print("No verdicts recorded")
    else:
        print(table.to_string(index=False))
    print("PASSED" if passed else "FAILED")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trigzeros", description="Zeros of random trigonometric polynomials"
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    for kind in EXPERIMENT_KINDS:
        sub = subparsers.add_parser(kind, help=f"Run the {kind} experiment")
        sub.add_argument("--config", required=True, help="Path to the experiment JSON config")
        sub.add_argument("--seed", type=int, help="Override the master seed")
        sub.add_argument("--out", type=str, help="Override the output directory")
        sub.add_argument("--threads", type=int, help="Override the worker thread count")
        sub.add_argument("--reps", type=int, help="Override the replicate count")
        sub.add_argument("--verbose", "-v", action="store_true", help="Enable debug logging")

    report = subparsers.add_parser("report", help="Print the verdicts of a written report")
    report.add_argument("--config", required=True, help="Path to report.json or its directory")
    report.add_argument("--verbose", "-v", action="store_true", help="Enable debug logging")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, dispatch and return the exit code."""
    args = build_parser().parse_args(argv)

    settings = Settings()
    setup_logging(settings.log_config)
    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)
    logger = get_logger("main")

    if args.command == "report":
        try:
            data = load_report(args.config)
        except (FileNotFoundError, ValueError) as e:
            print(f"Cannot read report: {e}", file=sys.stderr)
            return EXIT_INVALID_CONFIG
        print_verdicts(data["verdicts"], report_exit_code(data) == EXIT_PASSED)
        return report_exit_code(data)

    overrides = {
        "seed": args.seed,
        "out": args.out,
        "threads": args.threads,
        "reps": args.reps,
    }
    orchestrator = ExperimentOrchestrator(settings)
    try:
        report = orchestrator.run_file(args.command, args.config, overrides)
    except ConfigValidationError as e:
        print(f"Invalid config: {e}", file=sys.stderr)
        for name in e.fields:
            print(f"  field: {name}", file=sys.stderr)
        return EXIT_INVALID_CONFIG
    except Exception as e:
        logger.error(f"Experiment {args.command} failed: {e}", exc_info=True)
        print(f"Error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_FAILED

    print_verdicts([v.to_dict() for v in report.verdicts], report.passed)
    for message in report.warnings:
        print(f"warning: {message}")
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
