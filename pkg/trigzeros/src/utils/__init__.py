"""Shared utilities: logging, random streams, thread pools, files, validation."""

from .logging_utils import setup_logging, get_logger
from .performance_monitor import PerformanceMonitor
from .file_utils import FileUtils
from .validation_utils import ValidationUtils
from .rng import RngStream, stream_range

__all__ = [
    "setup_logging",
    "get_logger",
    "PerformanceMonitor",
    "FileUtils",
    "ValidationUtils",
    "RngStream",
    "stream_range",
]
