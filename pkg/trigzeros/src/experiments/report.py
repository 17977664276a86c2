"""
Experiment reports: JSON summary plus CSV tables and plot-data files.

CSV files only hold deterministic values, so rerunning a config reproduces them byte
for byte; wall times and resource metrics go to ``report.json``.
"""

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import pandas as pd

from .. import __version__
from ..utils.file_utils import FileUtils
from ..utils.logging_utils import get_logger

logger = get_logger("trigzeros.experiments.report")

REPORT_FILE = "report.json"
PLOT_COLUMNS = ["x", "y", "yerr"]


@dataclass
class Verdict:
    """Pass/fail check against a declared tolerance."""

    name: str
    passed: bool
    observed: float
    target: Optional[float] = None
    tolerance: Optional[float] = None
    detail: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "passed": bool(self.passed),
            "observed": _finite_or_none(self.observed),
            "target": _finite_or_none(self.target),
            "tolerance": _finite_or_none(self.tolerance),
            "detail": self.detail,
        }


def _finite_or_none(value: Optional[float]) -> Optional[float]:
    if value is None:
        return None
    value = float(value)
    return value if math.isfinite(value) else None


@dataclass
class ExperimentReport:
    kind: str
    config: Dict[str, Any]
    summary: pd.DataFrame
    plot: pd.DataFrame
    tables: Dict[str, pd.DataFrame] = field(default_factory=dict)
    verdicts: List[Verdict] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)
    oracle: Dict[str, Any] = field(default_factory=dict)
    runtime: Dict[str, Any] = field(default_factory=dict)
    fingerprint: Optional[str] = None
    version: str = __version__

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "version": self.version,
            "fingerprint": self.fingerprint,
            "config": self.config,
            "rows": self.summary.astype(object).where(self.summary.notna(), None).to_dict(orient="records"),
            "oracle": self.oracle,
            "verdicts": [v.to_dict() for v in self.verdicts],
            "passed": self.passed,
            "warnings": list(self.warnings),
            "runtime": self.runtime,
        }

    def write(self, out_dir: Union[str, Path]) -> Dict[str, Path]:
        """
        Write report.json, <kind>_summary.csv, <kind>_plot.csv and extra tables.

        Args:
            out_dir: Output directory (created if missing)

        Returns:
            Mapping from artifact name to path
        """
        directory = FileUtils.ensure_directory(out_dir)
        written = {"report": FileUtils.write_json(self.to_dict(), directory / REPORT_FILE)}
        written["summary"] = FileUtils.write_table(self.summary, directory / f"{self.kind}_summary.csv")
        written["plot"] = FileUtils.write_table(self.plot[PLOT_COLUMNS], directory / f"{self.kind}_plot.csv")
        for name, table in self.tables.items():
            written[name] = FileUtils.write_table(table, directory / f"{self.kind}_{name}.csv")
        logger.info(f"Wrote {len(written)} artifacts to {directory}")
        return written


def load_report(path: Union[str, Path]) -> Dict[str, Any]:
    """Read a written report; ``path`` may be the JSON file or its directory."""
    report_path = Path(path)
    if report_path.is_dir():
        report_path = report_path / REPORT_FILE
    data = FileUtils.read_json(report_path)
    for key in ("kind", "config", "verdicts"):
        if key not in data:
            raise ValueError(f"{report_path} is not an experiment report (missing {key!r})")
    return data


def verdict_table(report: Dict[str, Any]) -> pd.DataFrame:
    return pd.DataFrame(
        report.get("verdicts", []),
        columns=["name", "passed", "observed", "target", "tolerance", "detail"],
    )


def report_exit_code(report: Dict[str, Any]) -> int:
    return 0 if all(v.get("passed", False) for v in report.get("verdicts", [])) else 1
