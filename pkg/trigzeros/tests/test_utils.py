"""Tests for settings, random streams, thread fan-out and file helpers."""

import threading
import time

import numpy as np
import pandas as pd
import pytest
from pydantic import ValidationError

from src.config import Environment, Settings, get_environment
from src.config.environments import get_environment_config, reset_environment_config
from src.utils import FileUtils, PerformanceMonitor, RngStream, ValidationUtils, stream_range
from src.utils.parallel import chunked, replicate_map
from src.utils.rng import as_generator


class TestRngStream:
    def test_streams_are_addressable(self):
        first = RngStream(3, 5).generator().standard_normal(4)
        again = RngStream(3, 5).generator().standard_normal(4)
        other = RngStream(3, 6).generator().standard_normal(4)

        assert np.array_equal(first, again)
        assert not np.array_equal(first, other)

    def test_auxiliary_lane_is_distinct(self):
        stream = RngStream(3, 5)
        assert stream.auxiliary().stream_id == "3:5:1"
        assert stream.auxiliary().generator().random() != stream.generator().random()

    def test_stream_range(self):
        streams = stream_range(8, 10, 3)
        assert [s.index for s in streams] == [10, 11, 12]
        assert stream_range(8, 0, 0) == []
        with pytest.raises(ValueError):
            stream_range(8, 0, -1)

    def test_negative_seed_rejected(self):
        with pytest.raises(ValueError):
            RngStream(-1)

    def test_as_generator(self, rng):
        assert as_generator(rng) is rng
        assert isinstance(as_generator(RngStream(1)), np.random.Generator)
        with pytest.raises(TypeError):
            as_generator(42)


class TestParallel:
    def test_replicate_map_preserves_order(self):
        items = list(range(50))
        assert replicate_map(lambda x: x * x, items, max_workers=4) == [x * x for x in items]

    def test_threads_are_used(self):
        seen = set()
        barrier = threading.Barrier(2, timeout=5)

        def _work(x):
            seen.add(threading.get_ident())
            barrier.wait()
            return x

        assert replicate_map(_work, [0, 1], max_workers=2) == [0, 1]
        assert len(seen) == 2

    def test_chunked(self):
        assert chunked([1, 2, 3, 4, 5], 2) == [[1, 2], [3, 4], [5]]
        with pytest.raises(ValueError):
            chunked([1], 0)


class TestValidationUtils:
    def test_field_path(self):
        assert ValidationUtils.field_path(("model", "kernel", 0)) == "model.kernel[0]"
        assert ValidationUtils.field_path(()) == ""

    def test_degrees_and_ordering(self):
        assert ValidationUtils.validate_degrees([8, 16]) == []
        assert len(ValidationUtils.validate_degrees([0, True, 4])) == 2
        assert ValidationUtils.validate_ascending([1, 3, 2], "m") == ["m must be ascending"]

    def test_power_of_two_and_unit_norm(self):
        assert ValidationUtils.is_power_of_two(4096)
        assert not ValidationUtils.is_power_of_two(0)
        assert not ValidationUtils.is_power_of_two(96)
        assert ValidationUtils.validate_unit_norm([0.6, 0.8])
        assert not ValidationUtils.validate_unit_norm([1.0, 1.0])


class TestFileUtils:
    def test_json_accepts_numpy_values(self, tmp_path):
        path = FileUtils.write_json(
            {"count": np.int64(3), "mean": np.float64(0.5), "ok": np.bool_(True), "v": np.arange(2)},
            tmp_path / "nested" / "data.json",
        )
        assert FileUtils.read_json(path) == {"count": 3, "mean": 0.5, "ok": True, "v": [0, 1]}

    def test_tables_keep_full_precision(self, tmp_path):
        frame = pd.DataFrame({"x": [1.0 / 3.0, np.pi]})
        path = FileUtils.write_table(frame, tmp_path / "t.csv")

        assert FileUtils.read_table(path)["x"].tolist() == frame["x"].tolist()
        assert path.read_bytes().count(b"\r") == 0

    def test_file_hash_is_stable(self, tmp_path):
        path = tmp_path / "a.txt"
        path.write_bytes(b"zeros")
        assert FileUtils.get_file_hash(path) == FileUtils.get_file_hash(path)
        assert len(FileUtils.get_file_hash(path)) == 64

    def test_missing_json(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            FileUtils.read_json(tmp_path / "none.json")


class TestSettings:
    def test_testing_environment_defaults(self):
        settings = Settings()
        assert get_environment() == Environment.TESTING
        assert settings.log_level == "WARNING"
        assert settings.max_workers == 1
        assert not settings.performance_sampling

    def test_explicit_values_win(self):
        settings = Settings(max_workers=3, log_level="debug")
        assert settings.max_workers == 3
        assert settings.log_level == "DEBUG"

    def test_environment_variables(self, monkeypatch):
        monkeypatch.setenv("TRIGZEROS_GRID_SIZE", "1024")
        assert Settings().grid_size == 1024

    def test_invalid_values(self):
        with pytest.raises(ValidationError):
            Settings(grid_size=1000)
        with pytest.raises(ValidationError):
            Settings(log_level="loud")

    def test_file_round_trip(self, tmp_path):
        path = tmp_path / "settings.json"
        Settings(hermite_order=81).to_file(str(path))
        assert Settings.from_file(str(path)).hermite_order == 81
        with pytest.raises(FileNotFoundError):
            Settings.from_file(str(tmp_path / "missing.json"))
        yaml_path = tmp_path / "settings.yaml"
        yaml_path.write_text("hermite_order: 81\n", encoding="utf-8")
        with pytest.raises(ValueError):
            Settings.from_file(str(yaml_path))

    def test_production_environment(self, monkeypatch):
        monkeypatch.setenv("TRIGZEROS_ENVIRONMENT", "production")
        reset_environment_config()
        assert Settings().is_production()
        assert get_environment_config().get("performance_sampling")


class TestPerformanceMonitor:
    def test_disabled_monitor_records_replicates(self):
        monitor = PerformanceMonitor(enabled=False)
        monitor.start_monitoring("run")
        monitor.record_replicates("run", 40)
        metrics = monitor.stop_monitoring("run")

        assert metrics["replicates"] == 40
        assert metrics["cpu_samples"] == 0
        assert monitor.get_session_metrics("run") == metrics
        assert monitor.stop_monitoring("run") is None

    def test_enabled_monitor_samples(self):
        monitor = PerformanceMonitor(sample_interval=0.01)
        monitor.start_monitoring("run")
        time.sleep(0.1)
        metrics = monitor.stop_monitoring("run")
        assert metrics["memory_samples"] >= 1

    def test_system_info(self):
        info = PerformanceMonitor.system_info()
        assert info["cpu_count"] >= 1
        assert info["total_memory_mb"] > 0
