"""Tests for experiment configs, the runner, reports and the command line."""

import json
from pathlib import Path

import pytest

from main import EXIT_FAILED, EXIT_INVALID_CONFIG, EXIT_PASSED, ExperimentOrchestrator, main
from src.core.coeffgen import GaussianFunctionalModel, MovingAverageModel
from src.core.errors import ConfigValidationError
from src.experiments import ExperimentRunner, load_config, load_report, parse_config
from src.experiments.config import MODEL_PRESETS, ModelConfig
from src.experiments.report import report_exit_code, verdict_table

CONFIG_DIR = Path(__file__).resolve().parents[1] / "configs" / "experiments"


def _tv_config(make_config, **fields):
    config = make_config(
        "tv-bound",
        n=[16],
        tv_bound={"covariance": {"kind": "bargmann-fock"}, "m": [3, 6, 12]},
    )
    config.update(fields)
    return config


def _write(path, data):
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)


class TestConfig:
    def test_preset_names_expand(self, make_config):
        config = parse_config(make_config("expect-zeros", model="rademacher-ma1", n=[16], reps=100))
        assert config.model.preset == "rademacher-ma1"
        assert isinstance(config.build_model(), MovingAverageModel)

    @pytest.mark.parametrize("name", sorted(MODEL_PRESETS))
    def test_every_preset_builds(self, name):
        assert ModelConfig.from_preset(name).build().fingerprint

    def test_sign_preset_is_gaussian_functional(self):
        model = ModelConfig.from_preset("sign-exponential").build()
        assert isinstance(model, GaussianFunctionalModel)
        assert model.rho_G.support == 40

    def test_missing_seed_is_reported_by_field(self):
        with pytest.raises(ConfigValidationError) as excinfo:
            parse_config({"kind": "sinc-oracle"})
        assert "seed" in excinfo.value.fields

    @pytest.mark.parametrize(
        "fields, path",
        [
            ({"kind": "zeros"}, "kind"),
            ({"model": "no-such-model", "n": [8]}, "model"),
            ({"model": {"type": "ma", "family": "rademacher"}, "n": [8]}, "model"),
            ({"model": {"type": "iid", "family": "two-point"}, "n": [8]}, "model"),
            ({"model": "rademacher-iid", "n": [0]}, "n"),
            ({"model": "rademacher-iid", "n": [8], "oversample": 4}, "oversample"),
            ({"model": "rademacher-iid", "n": [8], "colour": "red"}, "colour"),
        ],
    )
    def test_invalid_fields(self, make_config, fields, path):
        data = make_config("small-ball")
        data.update(fields)
        with pytest.raises(ConfigValidationError) as excinfo:
            parse_config(data)
        assert any(name.startswith(path) for name in excinfo.value.fields)

    def test_kind_requirements(self, make_config):
        with pytest.raises(ConfigValidationError):
            parse_config(make_config("clt", n=[16]))
        with pytest.raises(ConfigValidationError):
            parse_config(make_config("expect-zeros", model="gaussian-iid", n=[16], reps=50))
        with pytest.raises(ConfigValidationError):
            parse_config(make_config("tv-bound"))

    def test_block_validation(self, make_config):
        with pytest.raises(ConfigValidationError) as excinfo:
            parse_config(make_config("tv-bound", n=[8], tv_bound={"m": [4, 2]}))
        assert any(name.startswith("tv_bound") for name in excinfo.value.fields)
        with pytest.raises(ConfigValidationError):
            parse_config(make_config("spectral", model="gaussian-iid", spectral={"grid_size": 1000}))
        with pytest.raises(ConfigValidationError):
            parse_config(make_config("sinc-oracle", sinc={"grid_size": 4096}))

    def test_small_ball_points_need_at_point_mode(self, make_config):
        block = {"mode": "sup_norm", "points": [{"delta": 0.1, "X": 0.3}]}
        with pytest.raises(ConfigValidationError) as excinfo:
            parse_config(make_config("small-ball", model="rademacher-iid", n=[4], small_ball=block))
        assert any(name.startswith("small_ball") for name in excinfo.value.fields)

    def test_overrides_replace_only_given_keys(self, make_config):
        config = parse_config(make_config("sinc-oracle", reps=10), {"seed": 99, "reps": None})
        assert config.seed == 99
        assert config.reps == 10

    def test_echo_can_be_submitted_again(self, make_config):
        config = parse_config(make_config("small-ball", model="sign-bargmann-fock", n=[8, 16]))
        assert parse_config(config.echo()).echo() == config.echo()

    @pytest.mark.parametrize("path", sorted(CONFIG_DIR.glob("*.json")), ids=lambda p: p.stem)
    def test_shipped_configs_are_valid(self, path):
        config = load_config(path)
        assert config.kind in path.stem.replace("_", "-")

    def test_load_config_errors(self, tmp_path):
        with pytest.raises(ConfigValidationError) as excinfo:
            load_config(tmp_path / "missing.json")
        assert excinfo.value.fields == ["<file>"]

        broken = tmp_path / "broken.json"
        broken.write_text("{not json", encoding="utf-8")
        with pytest.raises(ConfigValidationError):
            load_config(broken)

        listing = tmp_path / "list.json"
        listing.write_text("[1, 2]", encoding="utf-8")
        with pytest.raises(ConfigValidationError):
            load_config(listing)


class TestRunner:
    def test_tv_bound_run_passes(self, make_config):
        report = ExperimentRunner().run(parse_config(_tv_config(make_config)))

        assert report.passed
        assert report.exit_code == 0
        names = [v.name for v in report.verdicts]
        assert names == ["dominated[n=16]", "monotone[n=16]", "zero_beyond_support[n=16]"]
        assert report.summary["m"].tolist() == [3, 6, 12]
        assert report.fingerprint is None

    def test_spectral_run_records_truncation_warning(self, make_config):
        config = parse_config(make_config("spectral", model="sign-bargmann-fock", reps=200, n=[64]))
        report = ExperimentRunner().run(config)

        assert {"density", "hermite", "covariance"} <= set(report.tables)
        assert any(message.startswith("TruncationWarning") for message in report.warnings)
        assert report.summary["valid"][0]
        assert report.oracle["arcsine_max_error"] < 0.1
        assert report.fingerprint == config.build_model().fingerprint

    def test_sinc_oracle_failure_sets_exit_code(self, make_config):
        config = parse_config(
            make_config("sinc-oracle", reps=50, sinc={"grid_size": 64}, tolerances={"sinc_se": 1e-9})
        )
        report = ExperimentRunner().run(config)

        assert not report.passed
        assert report.exit_code == 1
        assert report.tables["counts"]["replicate"].tolist() == list(range(50))

    def test_exact_small_ball_needs_rademacher_model(self, make_config):
        config = parse_config(
            make_config(
                "small-ball",
                model="gaussian-iid",
                n=[4],
                reps=100,
                small_ball={"mode": "at_point", "delta": 0.2, "X": 0.5, "exact": True},
            )
        )
        with pytest.raises(ConfigValidationError):
            ExperimentRunner().run(config)

    def test_exact_small_ball_verdicts(self, make_config):
        config = parse_config(
            make_config(
                "small-ball",
                model="rademacher-iid",
                n=[4, 6],
                reps=2000,
                small_ball={"mode": "at_point", "delta": 0.3, "X": 0.9, "t": 0.5, "exact": True},
            )
        )
        report = ExperimentRunner().run(config)

        assert [v.name for v in report.verdicts] == ["exact[n=4]", "exact[n=6]"]
        assert report.summary["stream_start"].tolist() == [0, 2000]
        assert report.summary["exact"].notna().all()

    def test_exact_small_ball_over_points(self, make_config):
        points = [
            {"delta": 0.1, "X": 0.3, "t": 1.1},
            {"delta": 0.45, "X": 0.0, "t": 0.0},
            {"delta": 0.4, "X": 2.5, "t": -0.8},
        ]
        config = parse_config(
            make_config(
                "small-ball",
                model="rademacher-ma1",
                n=[4, 8],
                reps=2000,
                small_ball={"mode": "at_point", "exact": True, "points": points},
            )
        )
        report = ExperimentRunner().run(config)

        assert [v.name for v in report.verdicts][:3] == [
            "exact[n=4,point=0]",
            "exact[n=4,point=1]",
            "exact[n=4,point=2]",
        ]
        assert len(report.verdicts) == 6
        assert report.summary["stream_start"].tolist() == [2000 * i for i in range(6)]
        assert report.summary["delta"].tolist() == [0.1, 0.45, 0.4] * 2
        assert report.passed


class TestReports:
    def test_written_reports_are_reproducible(self, make_config, tmp_path):
        first = _tv_config(make_config, out=str(tmp_path / "first"))
        second = _tv_config(make_config, out=str(tmp_path / "second"))
        orchestrator = ExperimentOrchestrator()
        orchestrator.run_experiment(parse_config(first))
        orchestrator.run_experiment(parse_config(second))

        for name in ("tv-bound_summary.csv", "tv-bound_plot.csv"):
            assert (tmp_path / "first" / name).read_bytes() == (tmp_path / "second" / name).read_bytes()

    def test_report_round_trip_through_disk(self, make_config, tmp_path):
        config = parse_config(_tv_config(make_config))
        report = ExperimentRunner().run(config)
        written = report.write(tmp_path / "out")

        data = load_report(tmp_path / "out")
        assert set(written) == {"report", "summary", "plot"}
        assert data["kind"] == "tv-bound"
        assert data["config"]["seed"] == 7
        assert report_exit_code(data) == 0
        assert verdict_table(data)["passed"].all()

    def test_load_report_rejects_other_json(self, tmp_path):
        path = tmp_path / "other.json"
        path.write_text(json.dumps({"hello": 1}), encoding="utf-8")
        with pytest.raises(ValueError):
            load_report(path)

    def test_default_output_directory(self, make_config):
        orchestrator = ExperimentOrchestrator()
        config = parse_config({k: v for k, v in _tv_config(make_config).items() if k != "out"})
        assert orchestrator.output_dir(config).name == "tv-bound-seed7"


class TestCommandLine:
    def test_passing_run(self, make_config, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        path = _write(tmp_path / "tv.json", _tv_config(make_config))

        assert main(["tv-bound", "--config", path, "--threads", "2"]) == EXIT_PASSED
        assert (tmp_path / "tv-bound" / "report.json").exists()
        assert main(["report", "--config", str(tmp_path / "tv-bound")]) == EXIT_PASSED

    def test_failing_verdict(self, make_config, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        config = make_config("sinc-oracle", reps=50, sinc={"grid_size": 64}, tolerances={"sinc_se": 1e-9})
        path = _write(tmp_path / "sinc.json", config)

        assert main(["sinc-oracle", "--config", path]) == EXIT_FAILED
        assert main(["report", "--config", str(tmp_path / "sinc-oracle")]) == EXIT_FAILED

    def test_invalid_config(self, tmp_path, monkeypatch, capsys):
        monkeypatch.chdir(tmp_path)
        path = _write(tmp_path / "bad.json", {"n": [8]})

        assert main(["clt", "--config", path]) == EXIT_INVALID_CONFIG
        assert "seed" in capsys.readouterr().err

    def test_subcommand_fills_missing_kind(self, make_config, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        config = {k: v for k, v in _tv_config(make_config).items() if k != "kind"}
        path = _write(tmp_path / "tv.json", config)

        assert main(["tv-bound", "--config", path]) == EXIT_PASSED
        assert load_report(config["out"])["kind"] == "tv-bound"

    def test_subcommand_must_match_declared_kind(self, make_config, tmp_path, monkeypatch, capsys):
        monkeypatch.chdir(tmp_path)
        path = _write(tmp_path / "sinc.json", make_config("sinc-oracle", reps=50))

        assert main(["spectral", "--config", path]) == EXIT_INVALID_CONFIG
        assert "field: kind" in capsys.readouterr().err
        with pytest.raises(ConfigValidationError) as excinfo:
            load_config(path, kind="spectral")
        assert excinfo.value.fields == ["kind"]

    def test_seed_override_changes_output_directory(self, make_config, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        config = {k: v for k, v in _tv_config(make_config).items() if k != "out"}
        path = _write(tmp_path / "tv.json", config)

        assert main(["tv-bound", "--config", path, "--seed", "11"]) == EXIT_PASSED
        assert (tmp_path / "results" / "tv-bound-seed11" / "report.json").exists()

    def test_unreadable_report(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        assert main(["report", "--config", str(tmp_path / "nothing")]) == EXIT_INVALID_CONFIG
