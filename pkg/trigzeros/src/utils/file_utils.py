"""
File utilities for reports and result tables.
"""

import hashlib
import json
from pathlib import Path
from typing import Any, Dict, Union

import numpy as np
import pandas as pd

from .logging_utils import get_logger

FLOAT_FORMAT = "%.17g"

logger = get_logger("trigzeros.files")


def _to_builtin(value: Any) -> Any:
    """JSON fallback for numpy scalars and arrays."""
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


class FileUtils:
    """Utility class for file operations."""

    @staticmethod
    def ensure_directory(directory: Union[str, Path]) -> Path:
        """
        Ensure directory exists, create if it doesn't.

        Args:
            directory: Directory path

        Returns:
            Path object for the directory
        """
        dir_path = Path(directory)
        dir_path.mkdir(parents=True, exist_ok=True)
        return dir_path

    @staticmethod
    def get_file_hash(filepath: Union[str, Path], algorithm: str = "sha256") -> str:
        """
        Calculate hash of a file.

        Args:
            filepath: Path to file
            algorithm: Hashing algorithm

        Returns:
            File hash as hexadecimal string
        """
        hash_func = hashlib.new(algorithm)

        with open(filepath, "rb") as f:
            for chunk in iter(lambda: f.read(4096), b""):
                hash_func.update(chunk)

        return hash_func.hexdigest()

    @staticmethod
    def read_json(filepath: Union[str, Path]) -> Dict[str, Any]:
        file_path = Path(filepath)
        if not file_path.exists():
            raise FileNotFoundError(f"File not found: {filepath}")
        with open(file_path, "r", encoding="utf-8") as f:
            return json.load(f)

    @classmethod
    def write_json(cls, data: Dict[str, Any], filepath: Union[str, Path], indent: int = 2) -> Path:
        """
        Write a dictionary as JSON, converting numpy values.

        Args:
            data: Data to write
            filepath: Target path
            indent: JSON indentation

        Returns:
            Path written
        """
        file_path = Path(filepath)
        cls.ensure_directory(file_path.parent)
        with open(file_path, "w", encoding="utf-8") as f:
            json.dump(data, f, indent=indent, default=_to_builtin, allow_nan=True)
            f.write("\n")
        logger.debug(f"Wrote JSON file: {file_path}")
        return file_path

    @classmethod
    def write_table(cls, frame: pd.DataFrame, filepath: Union[str, Path]) -> Path:
        """
        Write a DataFrame as CSV with 17 significant digits.

        Args:
            frame: Table to write
            filepath: Target path

        Returns:
            Path written
        """
        file_path = Path(filepath)
        cls.ensure_directory(file_path.parent)
        frame.to_csv(file_path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        logger.debug(f"Wrote table {file_path.name} with {len(frame)} rows")
        return file_path

    @staticmethod
    def read_table(filepath: Union[str, Path]) -> pd.DataFrame:
        return pd.read_csv(filepath)
