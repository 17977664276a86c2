"""
Performance monitoring for experiment runs.
"""

import threading
import time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import psutil

from .logging_utils import get_logger, log_performance_metrics


@dataclass
class PerformanceMetrics:
    """Resource samples collected while an experiment runs."""

    start_time: float
    end_time: Optional[float] = None
    duration: Optional[float] = None
    cpu_usage: List[float] = field(default_factory=list)
    memory_usage: List[float] = field(default_factory=list)
    peak_memory: float = 0.0
    average_cpu: float = 0.0
    replicates: int = 0

    def finalize(self) -> None:
        if self.end_time:
            self.duration = self.end_time - self.start_time

        if self.cpu_usage:
            self.average_cpu = sum(self.cpu_usage) / len(self.cpu_usage)

        if self.memory_usage:
            self.peak_memory = max(self.memory_usage)

    def to_dict(self) -> Dict[str, Any]:
        duration = self.duration or 0.0
        return {
            "duration": duration,
            "average_cpu": self.average_cpu,
            "peak_memory_mb": self.peak_memory,
            "replicates": self.replicates,
            "replicates_per_second": self.replicates / duration if duration > 0 else None,
            "cpu_samples": len(self.cpu_usage),
            "memory_samples": len(self.memory_usage),
        }


class PerformanceMonitor:
    """Sample CPU and memory of the current process while experiments run."""

    def __init__(self, sample_interval: float = 1.0, enabled: bool = True):
        """
        Initialize performance monitor.

        Args:
            sample_interval: Interval between performance samples in seconds
            enabled: When False, sessions only record wall time
        """
        self.sample_interval = sample_interval
        self.enabled = enabled
        self.logger = get_logger("trigzeros.performance")

        self._active_sessions: Dict[str, PerformanceMetrics] = {}
        self._monitoring_threads: Dict[str, threading.Thread] = {}
        self._stop_events: Dict[str, threading.Event] = {}
        self._session_history: Dict[str, PerformanceMetrics] = {}

    def start_monitoring(self, session_id: str) -> None:
        """
        Start monitoring a session.

        Args:
            session_id: Unique identifier for the monitoring session
        """
        if session_id in self._active_sessions:
            self.logger.warning(f"Session {session_id} is already being monitored")
            return

        metrics = PerformanceMetrics(start_time=time.time())
        self._active_sessions[session_id] = metrics

        if self.enabled:
            stop_event = threading.Event()
            self._stop_events[session_id] = stop_event
            monitor_thread = threading.Thread(
                target=self._monitor_session, args=(session_id, metrics, stop_event), daemon=True
            )
            self._monitoring_threads[session_id] = monitor_thread
            monitor_thread.start()

        self.logger.debug(f"Started monitoring session: {session_id}")

    def record_replicates(self, session_id: str, count: int) -> None:
        metrics = self._active_sessions.get(session_id)
        if metrics is not None:
            metrics.replicates += count

    def stop_monitoring(self, session_id: str) -> Optional[Dict[str, Any]]:
        """
        Stop monitoring a session and return metrics.

        Args:
            session_id: Session identifier

        Returns:
            Performance metrics dictionary
        """
        if session_id not in self._active_sessions:
            self.logger.warning(f"Session {session_id} is not being monitored")
            return None

        stop_event = self._stop_events.pop(session_id, None)
        if stop_event:
            stop_event.set()

        monitor_thread = self._monitoring_threads.pop(session_id, None)
        if monitor_thread and monitor_thread.is_alive():
            monitor_thread.join(timeout=5.0)

        metrics = self._active_sessions.pop(session_id)
        metrics.end_time = time.time()
        metrics.finalize()
        self._session_history[session_id] = metrics

        metrics_dict = metrics.to_dict()
        log_performance_metrics(session_id, metrics_dict)
        return metrics_dict

    def _monitor_session(
        self, session_id: str, metrics: PerformanceMetrics, stop_event: threading.Event
    ) -> None:
        process = psutil.Process()

        while not stop_event.is_set():
            try:
                metrics.cpu_usage.append(process.cpu_percent())
                metrics.memory_usage.append(process.memory_info().rss / 1024 / 1024)
            except (psutil.NoSuchProcess, psutil.AccessDenied) as e:
                self.logger.warning(f"Error sampling performance for {session_id}: {e}")

            stop_event.wait(self.sample_interval)

    def get_session_metrics(self, session_id: str) -> Optional[Dict[str, Any]]:
        if session_id in self._session_history:
            return self._session_history[session_id].to_dict()
        return None

    @staticmethod
    def system_info() -> Dict[str, Any]:
        """Static machine description for report metadata."""
        memory = psutil.virtual_memory()
        return {
            "cpu_count": psutil.cpu_count(logical=True),
            "physical_cores": psutil.cpu_count(logical=False),
            "total_memory_mb": memory.total / 1024 / 1024,
        }
