"""
Validation helpers shared by settings, experiment configs and the CLI.
"""

from typing import Any, Dict, Iterable, List, Sequence

from pydantic import ValidationError

from .logging_utils import get_logger

logger = get_logger("trigzeros.validation")


class ValidationUtils:
    """Utility class for parameter validation."""

    @staticmethod
    def is_power_of_two(value: int) -> bool:
        return isinstance(value, int) and value > 0 and value & (value - 1) == 0

    @staticmethod
    def field_path(location: Iterable[Any]) -> str:
        """
        Dotted path for a pydantic error location.

        Args:
            location: Location tuple such as ``("model", "kernel", 0)``

        Returns:
            Path like ``model.kernel[0]``
        """
        path = ""
        for part in location:
            if isinstance(part, int):
                path += f"[{part}]"
            else:
                path += f".{part}" if path else str(part)
        return path

    @classmethod
    def format_errors(cls, error: ValidationError) -> List[Dict[str, str]]:
        """
        Flatten a pydantic ValidationError into field/message pairs.

        Args:
            error: Validation error raised by a model

        Returns:
            List of {"field": ..., "message": ...} dictionaries
        """
        return [
            {"field": cls.field_path(item["loc"]) or "<root>", "message": item["msg"]}
            for item in error.errors()
        ]

    @staticmethod
    def validate_degrees(degrees: Sequence[int]) -> List[str]:
        """
        Check a list of polynomial degrees.

        Returns:
            List of validation errors (empty if valid)
        """
        errors = []
        if not degrees:
            errors.append("degree list must not be empty")
        for i, n in enumerate(degrees):
            if not isinstance(n, int) or isinstance(n, bool) or n < 1:
                errors.append(f"degree {i} must be a positive integer")
        return errors

    @staticmethod
    def validate_ascending(values: Sequence[float], name: str = "values") -> List[str]:
        if any(b < a for a, b in zip(values, values[1:])):
            return [f"{name} must be ascending"]
        return []

    @staticmethod
    def validate_unit_norm(kernel: Sequence[float], tol: float = 1e-10) -> bool:
        return abs(sum(float(c) ** 2 for c in kernel) - 1.0) <= tol
