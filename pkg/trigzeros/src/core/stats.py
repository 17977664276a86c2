"""
Monte Carlo engines: zero density, small-ball frequencies, distance to the Gaussian
limit, tightness of the local field and tail moments of zero counts.

Replicate ``r`` of an experiment seeded with ``seed`` always uses the stream
``RngStream(seed, r)`` for coefficients and its auxiliary lane for the base point X,
so results do not depend on the thread count.
"""

import math
import time
import warnings
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import stats as scipy_stats

from ..utils.logging_utils import get_logger
from ..utils.parallel import chunked, replicate_map
from ..utils.rng import RngStream, stream_range
from .coeffgen import CoefficientModel, sample_coefficient_batch, sample_coefficients
from .errors import DegenerateDensityError, ReliabilityWarning
from .oracle import DENSITY_FLOOR, sinc_zero_counts
from .spectral import CovarianceSequence, evaluate_density
from .trigpoly import DEFAULT_OVERSAMPLE, TrigPolynomial, local_field, tightness_exact
from .zeros import count_zeros, count_zeros_local

logger = get_logger("trigzeros.core.stats")

TWO_PI = 2.0 * math.pi
Z95 = 1.96
MIN_ZERO_REPS = 100
MIN_TIGHTNESS_REPS = 1000
MIN_KS_SAMPLES = 100
SUSPICIOUS_FRACTION = 0.01
SUP_GRID_FACTOR = 16
BATCH_SIZE = 512
SMALL_BALL_MODES = ("at_point", "sup_norm")


@dataclass
class MCEstimate:
    """Mean of i.i.d. replicate values with its standard error and 95% interval."""

    mean: float
    stderr: float
    ci95: Tuple[float, float]
    replicates: int
    seed: int
    wall_time: float = 0.0
    warnings: List[str] = field(default_factory=list)
    details: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_samples(
        cls, samples, seed: int, wall_time: float = 0.0, **details: Any
    ) -> "MCEstimate":
        values = np.asarray(samples, dtype=float).ravel()
        if values.size < 2:
            raise ValueError("an estimate needs at least two replicates")
        mean = float(values.mean())
        stderr = float(values.std(ddof=1) / math.sqrt(values.size))
        return cls(
            mean=mean,
            stderr=stderr,
            ci95=(mean - Z95 * stderr, mean + Z95 * stderr),
            replicates=int(values.size),
            seed=int(seed),
            wall_time=float(wall_time),
            details=dict(details),
        )

    def within(self, target: float, k: float = 3.0) -> bool:
        """|mean - target| <= k standard errors."""
        return abs(self.mean - target) <= k * self.stderr

    def to_dict(self) -> Dict[str, Any]:
        return {
            "mean": self.mean,
            "stderr": self.stderr,
            "ci95": list(self.ci95),
            "replicates": self.replicates,
            "seed": self.seed,
            "wall_time": self.wall_time,
            "warnings": list(self.warnings),
            "details": dict(self.details),
        }


def uniform_base_point(stream: RngStream) -> float:
    """Base point X ~ Uniform[0, 2 pi) from the replicate's auxiliary lane."""
    return float(stream.auxiliary().generator().uniform(0.0, TWO_PI))


def flag_reliability(estimate: MCEstimate, suspicious: np.ndarray) -> MCEstimate:
    flagged = float(np.mean(suspicious > 0)) if suspicious.size else 0.0
    estimate.details["suspicious_fraction"] = flagged
    if flagged > SUSPICIOUS_FRACTION:
        message = f"{flagged:.2%} of replicates had suspicious grid cells"
        estimate.warnings.append(message)
        logger.warning(message)
        warnings.warn(message, ReliabilityWarning, stacklevel=3)
    return estimate


def zero_density_samples(
    model: CoefficientModel,
    n: int,
    reps: int,
    seed: int,
    oversample: int = DEFAULT_OVERSAMPLE,
    localized: bool = False,
    max_workers: int = 1,
    start: int = 0,
) -> pd.DataFrame:
    """
    Per-replicate zero densities.

    The full-interval estimator uses N(f_n, [0, 2 pi)) / n; the localized estimator
    uses N(S_n, [0, 2 pi)) at a uniform base point, which has the same mean.

    Returns:
        DataFrame with columns replicate, n, count, density, suspicious_cells
    """

    def _replicate(stream: RngStream) -> Dict[str, Any]:
        p = TrigPolynomial.from_sample(sample_coefficients(model, n, stream))
        if localized:
            result = count_zeros_local(local_field(p, uniform_base_point(stream)), oversample)
            density = float(result.count)
        else:
            result = count_zeros(p, oversample=oversample)
            density = result.count / n
        return {
            "replicate": stream.index,
            "n": n,
            "count": result.count,
            "density": density,
            "suspicious_cells": result.suspicious_cells,
        }

    rows = replicate_map(_replicate, stream_range(seed, start, reps), max_workers)
    return pd.DataFrame(rows, columns=["replicate", "n", "count", "density", "suspicious_cells"])


def mc_expected_zero_density(
    model: CoefficientModel,
    n: int,
    reps: int,
    seed: int,
    oversample: int = DEFAULT_OVERSAMPLE,
    localized: bool = False,
    max_workers: int = 1,
) -> MCEstimate:
    """
    Monte Carlo estimate of E N(f_n, [0, 2 pi)) / n.

    Args:
        model: Coefficient model
        n: Degree
        reps: Replicates (at least 100)
        seed: Master seed
        oversample: Zero-counting oversampling factor
        localized: Use the local-field estimator
        max_workers: Threads

    Returns:
        MCEstimate; a ReliabilityWarning is attached when more than 1% of replicates
        had suspicious cells
    """
    if reps < MIN_ZERO_REPS:
        raise ValueError(f"at least {MIN_ZERO_REPS} replicates are required")
    started = time.perf_counter()
    frame = zero_density_samples(model, n, reps, seed, oversample, localized, max_workers)
    estimate = MCEstimate.from_samples(
        frame["density"].to_numpy(),
        seed,
        time.perf_counter() - started,
        n=n,
        estimator="localized" if localized else "full",
    )
    return flag_reliability(estimate, frame["suspicious_cells"].to_numpy())


def _window_angles(X: np.ndarray, t: np.ndarray, n: int) -> np.ndarray:
    """Angles k (X + t / n) with shape (replicates, points, n)."""
    k = np.arange(1, n + 1, dtype=float)
    return np.multiply.outer(X[:, None] + t[None, :] / n, k)


def _local_values(A: np.ndarray, B: np.ndarray, X: np.ndarray, t: np.ndarray) -> np.ndarray:
    """S_n at positions ``t`` for each coefficient row, shape (replicates, points)."""
    n = A.shape[1]
    angles = _window_angles(X, t, n)
    values = np.einsum("rpk,rk->rp", np.cos(angles), A) + np.einsum("rpk,rk->rp", np.sin(angles), B)
    return values / math.sqrt(n)


def _base_points(streams: Sequence[RngStream], X: Optional[float]) -> np.ndarray:
    if X is not None:
        return np.full(len(streams), float(X))
    return np.array([uniform_base_point(s) for s in streams])


def empirical_small_ball(
    model: CoefficientModel,
    n: int,
    delta: float,
    reps: int,
    seed: int,
    mode: str = "at_point",
    t: float = 0.0,
    X: Optional[float] = None,
    max_workers: int = 1,
    start: int = 0,
) -> MCEstimate:
    """
    Frequency of {|S_n(t)| <= delta} or of {max |S_n| <= delta}.

    The sup-norm is taken over 16n equispaced window points; the Bernstein factor
    1 / (1 - pi / (16 n)) bounding the gap to the true supremum is reported in the
    estimate details.

    Args:
        model: Coefficient model
        n: Degree
        delta: Radius
        reps: Replicates
        seed: Master seed
        mode: ``at_point`` or ``sup_norm``
        t: Window position for ``at_point``
        X: Fixed base point; uniform per replicate when None
        max_workers: Threads
        start: First replicate index

    Returns:
        MCEstimate of the probability
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    if mode not in SMALL_BALL_MODES:
        raise ValueError(f"mode must be one of {SMALL_BALL_MODES}")
    started = time.perf_counter()

    streams = stream_range(seed, start, reps)
    details: Dict[str, Any] = {"n": n, "delta": delta, "mode": mode}

    if mode == "at_point":
        position = np.array([float(t)])

        def _batch(batch: Sequence[RngStream]) -> np.ndarray:
            A, B = sample_coefficient_batch(model, n, batch)
            values = _local_values(A, B, _base_points(batch, X), position)[:, 0]
            return (np.abs(values) <= delta).astype(float)

        hits = np.concatenate(replicate_map(_batch, chunked(streams, BATCH_SIZE), max_workers))
        details["t"] = float(t)
    else:
        points = SUP_GRID_FACTOR * n
        positions = TWO_PI * np.arange(points) / points

        def _replicate(stream: RngStream) -> float:
            p = TrigPolynomial.from_sample(sample_coefficients(model, n, stream))
            base = uniform_base_point(stream) if X is None else float(X)
            return float(np.max(np.abs(local_field(p, base)(positions))) <= delta)

        hits = np.array(replicate_map(_replicate, streams, max_workers))
        details["bernstein_factor"] = 1.0 / (1.0 - math.pi / points)
        details["grid_points"] = points
    return MCEstimate.from_samples(hits, seed, time.perf_counter() - started, **details)


def kolmogorov_distance(samples) -> float:
    """sup_x |F_emp(x) - Phi(x)|, two-sided over the jumps of the empirical CDF."""
    values = np.asarray(samples, dtype=float).ravel()
    if values.size < MIN_KS_SAMPLES:
        raise ValueError(f"at least {MIN_KS_SAMPLES} samples are required")
    return float(scipy_stats.kstest(values, "norm").statistic)


def clt_marginal_samples(
    model: CoefficientModel,
    n: int,
    reps: int,
    seed: int,
    rho: Optional[CovarianceSequence] = None,
    X: Optional[float] = None,
    max_workers: int = 1,
    start: int = 0,
) -> np.ndarray:
    """
    S_n(0) / sqrt(psi(X)) per replicate, with X uniform unless fixed.

    Args:
        model: Coefficient model
        n: Degree
        reps: Replicates
        seed: Master seed
        rho: Covariance defining psi; the model's own covariance by default
        X: Fixed base point
        max_workers: Threads
        start: First replicate index

    Returns:
        Vector of normalized marginals
    """
    rho = model.covariance() if rho is None else rho
    origin = np.zeros(1)

    def _batch(streams: Sequence[RngStream]) -> np.ndarray:
        A, B = sample_coefficient_batch(model, n, streams)
        base = _base_points(streams, X)
        psi = evaluate_density(rho, base)
        if np.any(psi < DENSITY_FLOOR):
            raise DegenerateDensityError("spectral density vanishes at a sampled base point")
        return _local_values(A, B, base, origin)[:, 0] / np.sqrt(psi)

    batches = chunked(stream_range(seed, start, reps), BATCH_SIZE)
    return np.concatenate(replicate_map(_batch, batches, max_workers))


def tightness_discrepancy(
    model: CoefficientModel,
    n: int,
    pairs: Sequence[Tuple[float, float]],
    reps: int,
    seed: int,
    derivative: bool = False,
    max_workers: int = 1,
) -> pd.DataFrame:
    """
    Empirical E_X E|S(t) - S(s)|^2 against its exact value for each pair.

    With ``derivative`` the increments are those of S_n'. Both values are compared
    with the bound |t - s|^2.

    Returns:
        DataFrame with columns s, t, empirical, stderr, exact, bound, within_bound
    """
    if reps < MIN_TIGHTNESS_REPS:
        raise ValueError(f"at least {MIN_TIGHTNESS_REPS} replicates are required")
    pairs = [(float(s), float(t)) for s, t in pairs]
    positions = np.array([p for pair in pairs for p in pair])
    k = np.arange(1, n + 1, dtype=float)

    def _batch(streams: Sequence[RngStream]) -> np.ndarray:
        A, B = sample_coefficient_batch(model, n, streams)
        base = _base_points(streams, None)
        if derivative:
            angles = _window_angles(base, positions, n)
            scale = k / n
            values = (
                np.einsum("rpk,rk->rp", np.cos(angles), B * scale)
                - np.einsum("rpk,rk->rp", np.sin(angles), A * scale)
            ) / math.sqrt(n)
        else:
            values = _local_values(A, B, base, positions)
        return (values[:, 1::2] - values[:, 0::2]) ** 2

    batches = chunked(stream_range(seed, 0, reps), BATCH_SIZE)
    squares = np.vstack(replicate_map(_batch, batches, max_workers))

    rows = []
    for j, (s, t) in enumerate(pairs):
        exact = tightness_exact(n, s, t, derivative=derivative)
        bound = (t - s) ** 2
        empirical = float(squares[:, j].mean())
        rows.append(
            {
                "s": s,
                "t": t,
                "empirical": empirical,
                "stderr": float(squares[:, j].std(ddof=1) / math.sqrt(reps)),
                "exact": exact,
                "bound": bound,
                "within_bound": bool(exact <= bound + 1e-12),
            }
        )
    return pd.DataFrame(rows)


def power_moment(counts, epsilon: float, seed: int, wall_time: float = 0.0) -> MCEstimate:
    """MCEstimate of E[N^{1+epsilon}] from zero counts."""
    if not 0.0 < epsilon <= 1.0:
        raise ValueError("epsilon must lie in (0, 1]")
    counts = np.asarray(counts, dtype=float)
    return MCEstimate.from_samples(counts ** (1.0 + epsilon), seed, wall_time, epsilon=epsilon)


def tail_moment(
    model: Optional[CoefficientModel],
    n: int,
    epsilon: float,
    reps: int,
    seed: int,
    oversample: int = DEFAULT_OVERSAMPLE,
    sinc_grid_size: int = 1024,
    max_workers: int = 1,
) -> MCEstimate:
    """
    E[N(S_n, [0, 2 pi))^{1 + epsilon}] with X uniform.

    ``model=None`` replaces S_n by the sinc limit process sampled on
    ``sinc_grid_size`` + 1 points.
    """
    if not 0.0 < epsilon <= 1.0:
        raise ValueError("epsilon must lie in (0, 1]")
    started = time.perf_counter()
    if model is None:
        counts = sinc_zero_counts(sinc_grid_size, reps, seed, max_workers)
        suspicious = np.zeros(0)
    else:
        frame = zero_density_samples(model, n, reps, seed, oversample, True, max_workers)
        counts = frame["count"].to_numpy()
        suspicious = frame["suspicious_cells"].to_numpy()
    estimate = power_moment(counts, epsilon, seed, time.perf_counter() - started)
    estimate.details.update({"n": n, "field": "sinc" if model is None else "local"})
    return flag_reliability(estimate, suspicious)


def separation_probability(
    model: CoefficientModel, delta0: float, reps: int, seed: int
) -> MCEstimate:
    """Monte Carlo estimate of P(|a_k - b_k| < delta0)."""
    if delta0 <= 0:
        raise ValueError("delta0 must be positive")
    started = time.perf_counter()
    A, B = sample_coefficient_batch(model, 1, stream_range(seed, 0, reps))
    hits = (np.abs(A[:, 0] - B[:, 0]) < delta0).astype(float)
    return MCEstimate.from_samples(hits, seed, time.perf_counter() - started, delta0=delta0)
