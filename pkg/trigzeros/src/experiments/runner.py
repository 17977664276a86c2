"""
Experiment runner: dispatches a validated config to the matching engine and
assembles the report with oracle columns and verdicts.
"""

import math
import time
import warnings
from dataclasses import dataclass, field
from datetime import datetime
from typing import Any, Callable, Dict, List, Optional

import numpy as np
import pandas as pd

from ..config.settings import Settings
from ..core.bounds import (
    exponent_ledger,
    gaussian_smallball_term,
    littlewood_delta,
    rate_remainder_scale,
)
from ..core.coeffgen import (
    CoefficientModel,
    Family,
    GaussianFunctionalModel,
    IidModel,
    MovingAverageModel,
    empirical_covariance,
    sample_coefficient_batch,
)
from ..core.errors import (
    ConfigValidationError,
    ReliabilityWarning,
    TruncationWarning,
)
from ..core.functionals import FunctionalKind, hermite_coefficients
from ..core.oracle import (
    SINC_ZERO_INTENSITY,
    KacRiceSpec,
    kac_rice_expected_zeros,
    limit_variance,
    sigma_n_sq,
    sinc_zero_counts,
)
from ..core.spectral import density_from_finite_covariance
from ..core.stats import (
    MCEstimate,
    clt_marginal_samples,
    empirical_small_ball,
    flag_reliability,
    kolmogorov_distance,
    power_moment,
    zero_density_samples,
)
from ..core.tvbound import truncation_sweep
from ..core.zeros import MAX_EXACT_DEGREE, rademacher_smallball_exact
from ..utils.logging_utils import get_structured_logger, log_experiment_event
from ..utils.performance_monitor import PerformanceMonitor
from ..utils.rng import stream_range
from .config import ExperimentConfig
from .report import ExperimentReport, Verdict

DKW_95 = 1.358
COVARIANCE_LAGS = 10
SIGMA_START = 256


@dataclass
class _Outcome:
    summary: pd.DataFrame
    plot: pd.DataFrame
    tables: Dict[str, pd.DataFrame] = field(default_factory=dict)
    verdicts: List[Verdict] = field(default_factory=list)
    oracle: Dict[str, Any] = field(default_factory=dict)
    warnings: List[str] = field(default_factory=list)
    replicates: int = 0


def _stream_columns(start: int, reps: int) -> Dict[str, int]:
    return {"stream_start": start, "stream_end": start + reps - 1}


def _estimate_columns(estimate: MCEstimate) -> Dict[str, Any]:
    return {
        "mean": estimate.mean,
        "stderr": estimate.stderr,
        "ci_low": estimate.ci95[0],
        "ci_high": estimate.ci95[1],
        "replicates": estimate.replicates,
    }


def _plot(x, y, yerr) -> pd.DataFrame:
    return pd.DataFrame({"x": list(x), "y": list(y), "yerr": list(yerr)})


def _sigma_degrees(final: int) -> List[int]:
    degrees = []
    n = SIGMA_START
    while n < final:
        degrees.append(n)
        n *= 2
    return degrees + [final]


class ExperimentRunner:
    """Run one experiment at a time; replicates fan out over ``config.threads``."""

    def __init__(self, settings: Optional[Settings] = None, monitor: Optional[PerformanceMonitor] = None):
        self.settings = settings or Settings()
        self.logger = get_structured_logger("trigzeros.experiments")
        self.monitor = monitor or PerformanceMonitor(
            self.settings.monitor_interval, self.settings.performance_sampling
        )
        self._handlers: Dict[str, Callable[[ExperimentConfig], _Outcome]] = {
            "expect-zeros": self._expect_zeros,
            "clt": self._clt,
            "small-ball": self._small_ball,
            "tv-bound": self._tv_bound,
            "spectral": self._spectral,
            "sinc-oracle": self._sinc_oracle,
        }

    def run(self, config: ExperimentConfig) -> ExperimentReport:
        """
        Run an experiment and build its report.

        Args:
            config: Validated experiment config

        Returns:
            ExperimentReport (not yet written to disk)
        """
        session = f"{config.kind}-{config.seed}"
        log_experiment_event(config.kind, "started", {"seed": config.seed, "n": config.n})
        self.monitor.start_monitoring(session)
        started_at = datetime.now().isoformat(timespec="seconds")
        started = time.perf_counter()

        try:
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always")
                outcome = self._handlers[config.kind](config)
        except Exception as exc:
            self.monitor.stop_monitoring(session)
            self.logger.log_error(exc, {"kind": config.kind, "seed": config.seed})
            log_experiment_event(config.kind, "failed", {"error": str(exc)})
            raise

        self.monitor.record_replicates(session, outcome.replicates)
        metrics = self.monitor.stop_monitoring(session) or {}
        wall_time = time.perf_counter() - started

        messages = list(outcome.warnings)
        for item in caught:
            if issubclass(item.category, (TruncationWarning, ReliabilityWarning)):
                text = f"{item.category.__name__}: {item.message}"
                if text not in messages:
                    messages.append(text)

        report = ExperimentReport(
            kind=config.kind,
            config=config.echo(),
            summary=outcome.summary,
            plot=outcome.plot,
            tables=outcome.tables,
            verdicts=outcome.verdicts,
            warnings=messages,
            oracle=outcome.oracle,
            runtime={
                "started_at": started_at,
                "wall_time": wall_time,
                "threads": config.threads,
                "performance": metrics,
                "system": PerformanceMonitor.system_info(),
            },
            fingerprint=config.build_model().fingerprint if config.model is not None else None,
        )
        log_experiment_event(
            config.kind,
            "completed",
            {"passed": report.passed, "verdicts": len(report.verdicts), "wall_time": wall_time},
        )
        return report

    def _expect_zeros(self, config: ExperimentConfig) -> _Outcome:
        model = config.build_model()
        tol = config.tolerances
        rho_gauss = model.gaussian_covariance()
        rows, frames, verdicts = [], [], []
        kac_values: Dict[str, float] = {}

        for i, n in enumerate(config.n):
            start = i * config.reps
            frame = zero_density_samples(
                model, n, config.reps, config.seed, config.oversample, config.localized,
                config.threads, start,
            )
            estimate = MCEstimate.from_samples(frame["density"].to_numpy(), config.seed, n=n)
            flag_reliability(estimate, frame["suspicious_cells"].to_numpy())
            frames.append(frame)
            self.logger.log_batch("expect-zeros", n, config.reps, mean=estimate.mean)

            kac = None
            if rho_gauss is not None:
                kac = kac_rice_expected_zeros(KacRiceSpec(rho_gauss, n)) / n
                kac_values[str(n)] = kac
                allowed = tol.oracle_se * estimate.stderr
                verdicts.append(
                    Verdict(f"kac_rice[n={n}]", abs(estimate.mean - kac) <= allowed, estimate.mean, kac, allowed)
                )
            else:
                allowed = tol.universality_rel * SINC_ZERO_INTENSITY
                verdicts.append(
                    Verdict(
                        f"universality[n={n}]",
                        abs(estimate.mean - SINC_ZERO_INTENSITY) <= allowed,
                        estimate.mean,
                        SINC_ZERO_INTENSITY,
                        allowed,
                    )
                )

            rows.append(
                {
                    "n": n,
                    **_estimate_columns(estimate),
                    **_stream_columns(start, config.reps),
                    "kac_rice": kac if kac is not None else math.nan,
                    "limit": SINC_ZERO_INTENSITY,
                    "suspicious_fraction": estimate.details["suspicious_fraction"],
                }
            )

        summary = pd.DataFrame(rows)
        return _Outcome(
            summary=summary,
            plot=_plot(summary["n"], summary["mean"], 1.96 * summary["stderr"]),
            tables={"counts": pd.concat(frames, ignore_index=True)},
            verdicts=verdicts,
            oracle={"limit": SINC_ZERO_INTENSITY, "kac_rice": kac_values},
            replicates=config.reps * len(config.n),
        )

    def _clt(self, config: ExperimentConfig) -> _Outcome:
        model = config.build_model()
        tol = config.tolerances
        rho = model.covariance(self.settings.hermite_order)
        functional = getattr(model, "functional", None)
        eta = functional.eta if functional is not None else 1.0
        ledger = exponent_ledger(eta)

        rows = []
        for i, n in enumerate(config.n):
            start = i * config.reps
            samples = clt_marginal_samples(
                model, n, config.reps, config.seed, rho, None, config.threads, start
            )
            rows.append(
                {
                    "n": n,
                    "kolmogorov": kolmogorov_distance(samples),
                    "sample_mean": float(np.mean(samples)),
                    "sample_variance": float(np.var(samples, ddof=1)),
                    "replicates": config.reps,
                    **_stream_columns(start, config.reps),
                    "rate_scale": rate_remainder_scale(n, eta),
                }
            )
        summary = pd.DataFrame(rows)

        verdicts = []
        distances = summary["kolmogorov"].to_numpy()
        if distances.size >= 2:
            inversions = int(np.sum(np.diff(distances) >= 0.0))
            verdicts.append(
                Verdict(
                    "kolmogorov_trend",
                    inversions <= tol.kolmogorov_inversions,
                    inversions,
                    0.0,
                    tol.kolmogorov_inversions,
                    "count of n steps where the distance did not decrease",
                )
            )

        sigma_rows = []
        clt = config.clt
        for j, (t, xi) in enumerate(zip(clt.sigma_points, clt.sigma_weights)):
            target = limit_variance(t, xi)
            for n in _sigma_degrees(clt.sigma_n):
                value = sigma_n_sq(clt.sigma_X, t, xi, rho, n)
                sigma_rows.append(
                    {"config": j, "n": n, "sigma_sq": value, "limit": target, "error": abs(value - target)}
                )
            final = sigma_rows[-1]
            verdicts.append(
                Verdict(f"sigma_limit[{j}]", final["error"] < tol.sigma_abs, final["sigma_sq"], target, tol.sigma_abs)
            )

        return _Outcome(
            summary=summary,
            plot=_plot(summary["n"], summary["kolmogorov"], [DKW_95 / math.sqrt(config.reps)] * len(summary)),
            tables={"sigma": pd.DataFrame(sigma_rows)},
            verdicts=verdicts,
            oracle={"exponents": ledger.to_dict()},
            replicates=config.reps * len(config.n),
        )

    def _exact_kernel(self, model: CoefficientModel) -> Optional[tuple]:
        if isinstance(model, IidModel) and model.law.family == Family.RADEMACHER:
            return (1.0,)
        if isinstance(model, MovingAverageModel) and model.law.family == Family.RADEMACHER:
            return model.kernel
        return None

    def _small_ball_points(self, config: ExperimentConfig, n: int) -> List[tuple]:
        """(label, delta, X, t) for each evaluation at degree n."""
        sb = config.small_ball
        if sb.points:
            return [(f"n={n},point={j}", p.delta, p.X, p.t) for j, p in enumerate(sb.points)]
        delta = sb.delta if sb.delta is not None else littlewood_delta(n, sb.beta)
        return [(f"n={n}", delta, sb.X, sb.t)]

    def _small_ball(self, config: ExperimentConfig) -> _Outcome:
        model = config.build_model()
        tol = config.tolerances
        sb = config.small_ball
        kernel = self._exact_kernel(model) if sb.exact else None
        if sb.exact:
            if kernel is None or sb.mode != "at_point" or (sb.X is None and not sb.points):
                raise ConfigValidationError(
                    "exact small-ball needs a Rademacher iid or moving-average model, "
                    "mode 'at_point' and a fixed X",
                    ["small_ball.exact"],
                )
            if max(config.n) > MAX_EXACT_DEGREE:
                raise ConfigValidationError(f"exact small-ball needs n <= {MAX_EXACT_DEGREE}", ["n"])

        rho = model.covariance(self.settings.hermite_order)
        kappa = density_from_finite_covariance(rho, self.settings.grid_size).kappa

        rows, verdicts = [], []
        for n in config.n:
            for label, delta, X, t in self._small_ball_points(config, n):
                start = len(rows) * config.reps
                estimate = empirical_small_ball(
                    model, n, delta, config.reps, config.seed, sb.mode, t, X, config.threads, start
                )
                row = {
                    "n": n,
                    "delta": delta,
                    "X": math.nan if X is None else X,
                    "t": t,
                    "mode": sb.mode,
                    **_estimate_columns(estimate),
                    **_stream_columns(start, config.reps),
                    "gaussian_term": gaussian_smallball_term(delta, kappa) if kappa > 0 else math.nan,
                    "bernstein_factor": estimate.details.get("bernstein_factor", math.nan),
                    "exact": math.nan,
                }
                if kernel is not None:
                    exact = rademacher_smallball_exact(n, float(X), t, delta, kernel)
                    row["exact"] = exact
                    spread = max(
                        estimate.stderr, math.sqrt(exact * (1.0 - exact) / config.reps), 1.0 / config.reps
                    )
                    allowed = tol.oracle_se * spread
                    passed = abs(estimate.mean - exact) <= allowed
                    verdicts.append(Verdict(f"exact[{label}]", passed, estimate.mean, exact, allowed))
                elif sb.mode == "sup_norm":
                    verdicts.append(
                        Verdict(
                            f"small_ball_ceiling[{label}]",
                            estimate.mean < tol.small_ball_ceiling,
                            estimate.mean,
                            None,
                            tol.small_ball_ceiling,
                        )
                    )
                rows.append(row)

        summary = pd.DataFrame(rows)
        return _Outcome(
            summary=summary,
            plot=_plot(summary["n"], summary["mean"], 1.96 * summary["stderr"]),
            verdicts=verdicts,
            oracle={"kappa": kappa},
            replicates=config.reps * len(rows),
        )

    def _tv_bound(self, config: ExperimentConfig) -> _Outcome:
        rho_G = config.tv_bound.covariance.build()
        grid_size = config.spectral.grid_size
        kappa_G = density_from_finite_covariance(rho_G, grid_size).kappa

        frames, verdicts = [], []
        for n in config.n:
            sweep = truncation_sweep(rho_G, n, config.tv_bound.m, grid_size)
            sweep.insert(0, "n", n)
            frames.append(sweep)

            tv, trace = sweep["tv_bound"].to_numpy(), sweep["trace_bound"].to_numpy()
            verdicts.append(
                Verdict(f"dominated[n={n}]", bool(np.all(tv <= trace + 1e-15)), float(np.max(tv - trace)), 0.0, 1e-15)
            )
            rise = float(np.max(np.diff(tv))) if tv.size > 1 else 0.0
            verdicts.append(Verdict(f"monotone[n={n}]", rise <= 1e-12, rise, 0.0, 1e-12))
            beyond = sweep["m"].to_numpy() >= rho_G.support
            if np.any(beyond):
                worst = float(np.max(tv[beyond]))
                verdicts.append(Verdict(f"zero_beyond_support[n={n}]", worst == 0.0, worst, 0.0, 0.0))

        summary = pd.concat(frames, ignore_index=True)
        return _Outcome(
            summary=summary,
            plot=_plot(summary["m"], summary["tv_bound"], [0.0] * len(summary)),
            verdicts=verdicts,
            oracle={"kappa_G": kappa_G, "support": rho_G.support},
        )

    def _spectral(self, config: ExperimentConfig) -> _Outcome:
        model = config.build_model()
        tol = config.tolerances
        spec = config.spectral
        rho = model.covariance(spec.hermite_order)
        density = density_from_finite_covariance(rho, spec.grid_size)
        tables = {"density": density.to_frame()}

        row: Dict[str, Any] = {
            "support": rho.support,
            "kappa": density.kappa,
            "mass": density.mass(),
            "symmetry_defect": density.symmetry_defect(),
            "valid": density.is_valid,
            "residual_mass": 0.0,
        }
        oracle: Dict[str, Any] = {}
        if isinstance(model, GaussianFunctionalModel):
            expansion = hermite_coefficients(model.functional, spec.hermite_order)
            tables["hermite"] = pd.DataFrame(expansion.to_records())
            row["residual_mass"] = expansion.residual_mass
            if model.functional.kind == FunctionalKind.SIGN:
                arcsine = 2.0 / math.pi * np.arcsin(model.rho_G.values)
                oracle["arcsine_max_error"] = float(np.max(np.abs(arcsine[1:] - rho.values[1:]))) if rho.support else 0.0

        verdicts = [
            Verdict("mass", abs(row["mass"] - 1.0) <= tol.density_mass, row["mass"], 1.0, tol.density_mass),
            Verdict("positivity", bool(density.is_valid), density.kappa, 0.0, None),
        ]

        replicates = 0
        if config.n:
            n = config.n[0]
            A, _ = sample_coefficient_batch(model, n, stream_range(config.seed, 0, config.reps))
            maxlag = min(COVARIANCE_LAGS, n - 1)
            estimate = empirical_covariance(A, maxlag)
            target = rho.padded(maxlag + 1)
            stderr = estimate.stderr if estimate.stderr is not None else np.zeros(maxlag + 1)
            tables["covariance"] = pd.DataFrame(
                {"lag": np.arange(maxlag + 1), "rho": target, "empirical": estimate.values, "stderr": stderr}
            )
            deviation = np.abs(estimate.values - target)
            allowed = tol.oracle_se * np.maximum(stderr, 1e-12)
            worst = int(np.argmax(deviation / allowed))
            verdicts.append(
                Verdict(
                    "empirical_covariance",
                    bool(np.all(deviation <= allowed)),
                    float(estimate.values[worst]),
                    float(target[worst]),
                    float(allowed[worst]),
                    f"worst lag {worst}",
                )
            )
            replicates = config.reps

        return _Outcome(
            summary=pd.DataFrame([row]),
            plot=_plot(density.grid, density.values, [0.0] * density.grid_size),
            tables=tables,
            verdicts=verdicts,
            oracle=oracle,
            replicates=replicates,
        )

    def _sinc_oracle(self, config: ExperimentConfig) -> _Outcome:
        sc = config.sinc
        counts = sinc_zero_counts(sc.grid_size, config.reps, config.seed, config.threads)
        estimate = MCEstimate.from_samples(counts, config.seed)
        tail = power_moment(counts, sc.epsilon, config.seed)
        allowed = config.tolerances.sinc_se * estimate.stderr

        summary = pd.DataFrame(
            [
                {
                    "grid_size": sc.grid_size,
                    **_estimate_columns(estimate),
                    **_stream_columns(0, config.reps),
                    "limit": SINC_ZERO_INTENSITY,
                    "epsilon": sc.epsilon,
                    "tail_moment": tail.mean,
                    "tail_stderr": tail.stderr,
                }
            ]
        )
        values, frequency = np.unique(counts, return_counts=True)
        share = frequency / config.reps
        return _Outcome(
            summary=summary,
            plot=_plot(values, share, np.sqrt(share * (1.0 - share) / config.reps)),
            tables={"counts": pd.DataFrame({"replicate": np.arange(config.reps), "count": counts})},
            verdicts=[
                Verdict(
                    "sinc_intensity",
                    abs(estimate.mean - SINC_ZERO_INTENSITY) <= allowed,
                    estimate.mean,
                    SINC_ZERO_INTENSITY,
                    allowed,
                )
            ],
            oracle={"limit": SINC_ZERO_INTENSITY},
            replicates=config.reps,
        )
