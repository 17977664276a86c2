"""
Zero counting for trigonometric polynomials and local fields, plus an exhaustive
small-ball oracle for Rademacher coefficients.

Counting is done on the half-open interval [lo, hi): a zero exactly at ``lo`` counts,
a zero exactly at ``hi`` does not, which matches counting on the circle.
"""

import math
from dataclasses import dataclass
from typing import Callable, Optional, Protocol, Sequence, Tuple

import numpy as np

from ..utils.logging_utils import get_logger
from .errors import EvaluationError, InvalidModelError, ResourceLimitError
from .trigpoly import (
    DEFAULT_OVERSAMPLE,
    GridTaylorEvaluator,
    LocalFieldWindow,
    TrigPolynomial,
    derivative,
    next_power_of_two,
)

logger = get_logger("trigzeros.core.zeros")

TWO_PI = 2.0 * math.pi
MIN_GRID_POINTS = 1024
MIN_OVERSAMPLE = 8
REFINE_DEPTH = 40
REFINE_XTOL = 1e-12
SUBDIVISIONS = 8
MAX_EXACT_DEGREE = 12
MAX_EXACT_INNOVATIONS = 16

Evaluator = Callable[[np.ndarray], np.ndarray]


class Field(Protocol):
    """Anything zero counting can sample: a callable with a frequency bandwidth."""

    @property
    def bandwidth(self) -> float: ...

    @property
    def coefficient_norm(self) -> float: ...

    def __call__(self, t: np.ndarray) -> np.ndarray: ...


@dataclass(frozen=True, eq=False)
class ZeroCountResult:
    count: int
    roots: np.ndarray
    suspicious_cells: int
    oversample: int
    grid_size: int
    abs_tol: float
    interval: Tuple[float, float] = (0.0, TWO_PI)
    max_residual: float = 0.0

    def __post_init__(self) -> None:
        if self.count != len(self.roots):
            raise ValueError("count must equal the number of roots")


@dataclass
class _Probe:
    grid: np.ndarray
    values: np.ndarray
    evaluate: Evaluator
    slopes: Optional[np.ndarray] = None
    slope: Optional[Evaluator] = None


def default_abs_tol(coefficient_norm: float) -> float:
    return 1e-9 * (1.0 + coefficient_norm)


def _is_full_circle(interval: Tuple[float, float]) -> bool:
    lo, hi = interval
    return lo == 0.0 and math.isclose(hi, TWO_PI, rel_tol=0.0, abs_tol=1e-15)


def _grid_points(field: Field, interval: Tuple[float, float], oversample: int) -> int:
    lo, hi = interval
    periods = (hi - lo) / TWO_PI
    return max(MIN_GRID_POINTS, next_power_of_two(oversample * field.bandwidth * periods))


def _probe(field: Field, interval: Tuple[float, float], oversample: int) -> _Probe:
    lo, hi = interval
    size = _grid_points(field, interval, oversample)

    if isinstance(field, TrigPolynomial) and _is_full_circle(interval):
        taylor = GridTaylorEvaluator(field, size)
        grid = TWO_PI * np.arange(size + 1) / size
        values = np.append(taylor.values, taylor.values[0])
        slopes = taylor.derivative_values
        return _Probe(grid, values, taylor, np.append(slopes, slopes[0]), taylor.derivative)

    grid = lo + (hi - lo) * np.arange(size + 1) / size
    values = np.asarray(field(grid), dtype=float)
    slope_field: Optional[Evaluator] = None
    if isinstance(field, TrigPolynomial):
        slope_field = derivative(field, 1)
    elif isinstance(field, LocalFieldWindow):
        slope_field = field.derivative()
    slopes = None if slope_field is None else np.asarray(slope_field(grid), dtype=float)
    return _Probe(grid, values, field, slopes, slope_field)


def refine_brackets(
    fn: Evaluator,
    lo: np.ndarray,
    hi: np.ndarray,
    f_lo: np.ndarray,
    f_hi: np.ndarray,
    abs_tol: float,
    xtol: float = REFINE_XTOL,
    depth: int = REFINE_DEPTH,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Illinois iteration on many sign-changing brackets at once.

    Every fourth step bisects. A bracket stops once its width is below ``xtol`` or
    the latest iterate has |f| < ``abs_tol``.

    Returns:
        Best iterates and their function values
    """
    lo, hi = lo.astype(float).copy(), hi.astype(float).copy()
    f_lo, f_hi = f_lo.astype(float).copy(), f_hi.astype(float).copy()
    take_lo = np.abs(f_lo) <= np.abs(f_hi)
    best_t = np.where(take_lo, lo, hi)
    best_f = np.where(take_lo, f_lo, f_hi)
    side = np.zeros(lo.shape, dtype=np.int8)
    active = np.ones(lo.shape, dtype=bool)

    for step in range(depth):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        a, b, fa, fb = lo[idx], hi[idx], f_lo[idx], f_hi[idx]
        midpoint = 0.5 * (a + b)
        if step % 4 == 3:
            t = midpoint
        else:
            denom = fb - fa
            with np.errstate(divide="ignore", invalid="ignore"):
                t = (a * fb - b * fa) / denom
            t = np.where(np.isfinite(t) & (t > a) & (t < b), t, midpoint)

        ft = np.asarray(fn(t), dtype=float)
        if not np.all(np.isfinite(ft)):
            raise EvaluationError("field returned non-finite values during refinement")

        better = np.abs(ft) < np.abs(best_f[idx])
        best_t[idx] = np.where(better, t, best_t[idx])
        best_f[idx] = np.where(better, ft, best_f[idx])

        keep_hi = np.sign(ft) == np.sign(fa)
        moved = np.where(keep_hi, 1, -1).astype(np.int8)
        repeat = moved == side[idx]
        lo[idx] = np.where(keep_hi, t, a)
        f_lo[idx] = np.where(keep_hi, ft, np.where(repeat, 0.5 * fa, fa))
        hi[idx] = np.where(keep_hi, b, t)
        f_hi[idx] = np.where(keep_hi, np.where(repeat, 0.5 * fb, fb), ft)
        side[idx] = moved

        done = (ft == 0.0) | (np.abs(ft) < abs_tol) | (hi[idx] - lo[idx] <= xtol)
        active[idx[done]] = False

    return best_t, best_f


def count_sign_changes(values: np.ndarray, axis: int = -1) -> np.ndarray:
    """
    Half-open sign-change count along ``axis`` of sampled paths.

    Each cell [v_j, v_{j+1}) contributes one zero if v_j == 0 or v_j * v_{j+1} < 0.
    """
    values = np.moveaxis(np.asarray(values, dtype=float), axis, -1)
    left, right = values[..., :-1], values[..., 1:]
    hits = (left == 0.0) | (left * right < 0.0)
    return hits.sum(axis=-1)


def count_zeros(
    field: Field,
    interval: Tuple[float, float] = (0.0, TWO_PI),
    oversample: int = DEFAULT_OVERSAMPLE,
    abs_tol: Optional[float] = None,
) -> ZeroCountResult:
    """
    Count zeros of ``field`` on [lo, hi).

    The field is sampled on max(1024, oversample * bandwidth) points per period.
    Sign-changing cells are refined; cells where f' changes sign but f does not are
    checked for a hidden pair of roots; cells with |f| < abs_tol and no sign change
    are subdivided once and, if still ambiguous, reported as suspicious.

    Args:
        field: TrigPolynomial, LocalFieldWindow or any Field
        interval: (lo, hi)
        oversample: Grid points per unit of bandwidth and period (at least 8)
        abs_tol: Residual tolerance; defaults to 1e-9 * (1 + ||coefficients||_2)

    Returns:
        ZeroCountResult with sorted roots
    """
    if oversample < MIN_OVERSAMPLE:
        raise ValueError(f"oversample must be at least {MIN_OVERSAMPLE}")
    lo, hi = float(interval[0]), float(interval[1])
    if not hi > lo:
        raise ValueError("interval must satisfy lo < hi")
    tol = default_abs_tol(field.coefficient_norm) if abs_tol is None else float(abs_tol)

    probe = _probe(field, (lo, hi), oversample)
    values = probe.values
    if not np.all(np.isfinite(values)):
        raise EvaluationError("field returned non-finite values on the sampling grid")

    left, right = values[:-1], values[1:]
    exact = left == 0.0
    change = left * right < 0.0
    handled = exact | change
    pieces = [probe.grid[:-1][exact]]
    residuals = [np.zeros(int(exact.sum()))]

    cells = np.flatnonzero(change)
    if cells.size:
        roots, res = refine_brackets(
            probe.evaluate, probe.grid[cells], probe.grid[cells + 1], left[cells], right[cells], tol
        )
        pieces.append(roots)
        residuals.append(res)

    suspicious = 0
    if probe.slopes is not None and probe.slope is not None:
        extra, extra_res, ambiguous, checked = _hidden_pairs(probe, handled, tol)
        pieces.extend(extra)
        residuals.extend(extra_res)
        suspicious += ambiguous
        handled = handled | checked

    small = ~handled & (np.minimum(np.abs(left), np.abs(right)) < tol)
    if np.any(small):
        extra, extra_res, ambiguous = _subdivide(probe, np.flatnonzero(small), tol)
        pieces.extend(extra)
        residuals.extend(extra_res)
        suspicious += ambiguous

    roots = np.sort(np.concatenate(pieces)) if pieces else np.empty(0)
    residual = np.concatenate(residuals) if residuals else np.empty(0)
    if suspicious:
        logger.debug(f"{suspicious} suspicious cells on a grid of {len(left)} points")
    return ZeroCountResult(
        count=int(roots.size),
        roots=roots,
        suspicious_cells=int(suspicious),
        oversample=int(oversample),
        grid_size=int(len(left)),
        abs_tol=tol,
        interval=(lo, hi),
        max_residual=float(np.max(np.abs(residual))) if residual.size else 0.0,
    )


def _hidden_pairs(probe: _Probe, handled: np.ndarray, tol: float):
    """Roots hiding next to an interior extremum of a cell without a sign change."""
    slopes = probe.slopes
    cells = np.flatnonzero(~handled & (slopes[:-1] * slopes[1:] < 0.0))
    if cells.size == 0:
        return [], [], 0, np.zeros(handled.shape, dtype=bool)

    grid, values = probe.grid, probe.values
    critical, _ = refine_brackets(
        probe.slope, grid[cells], grid[cells + 1], slopes[cells], slopes[cells + 1], 0.0
    )
    f_crit = np.asarray(probe.evaluate(critical), dtype=float)
    f_left = values[cells]

    crossing = f_crit * f_left < 0.0
    touching = f_crit == 0.0
    near = ~crossing & ~touching & (np.abs(f_crit) < tol)

    checked = np.zeros(handled.shape, dtype=bool)
    checked[cells] = True
    pieces, residuals = [critical[touching]], [np.zeros(int(touching.sum()))]
    pair = cells[crossing]
    if pair.size:
        t_star, f_star = critical[crossing], f_crit[crossing]
        first, r1 = refine_brackets(probe.evaluate, grid[pair], t_star, values[pair], f_star, tol)
        second, r2 = refine_brackets(probe.evaluate, t_star, grid[pair + 1], f_star, values[pair + 1], tol)
        pieces.extend([first, second])
        residuals.extend([r1, r2])
        logger.debug(f"Recovered {2 * pair.size} roots from close pairs")
    return pieces, residuals, int(near.sum()), checked


def _subdivide(probe: _Probe, cells: np.ndarray, tol: float):
    """Resample small cells 8x and pick up any sign changes they hide."""
    offsets = np.arange(SUBDIVISIONS + 1) / SUBDIVISIONS
    width = probe.grid[cells + 1] - probe.grid[cells]
    points = probe.grid[cells][:, None] + width[:, None] * offsets[None, :]
    sub = np.asarray(probe.evaluate(points.ravel()), dtype=float).reshape(points.shape)
    sub[:, 0] = probe.values[cells]
    sub[:, -1] = probe.values[cells + 1]

    left, right = sub[:, :-1], sub[:, 1:]
    exact = (left == 0.0) & (np.arange(SUBDIVISIONS) > 0)
    change = left * right < 0.0
    pieces = [points[:, :-1][exact]]
    residuals = [np.zeros(int(exact.sum()))]
    rows, cols = np.nonzero(change)
    if rows.size:
        roots, res = refine_brackets(
            probe.evaluate,
            points[rows, cols],
            points[rows, cols + 1],
            left[rows, cols],
            right[rows, cols],
            tol,
        )
        pieces.append(roots)
        residuals.append(res)

    resolved = exact.any(axis=1) | change.any(axis=1)
    ambiguous = ~resolved & (np.abs(sub).min(axis=1) < tol)
    return pieces, residuals, int(ambiguous.sum())


def count_zeros_local(window: LocalFieldWindow, oversample: int = DEFAULT_OVERSAMPLE) -> ZeroCountResult:
    """Zeros of the local field S_n on [0, 2 pi); bandwidth 1, so 1024 points suffice."""
    return count_zeros(window, (0.0, TWO_PI), oversample)


def _band_matrix(kernel: np.ndarray, n: int) -> np.ndarray:
    m = len(kernel) - 1
    band = np.zeros((n, n + m))
    for j, c in enumerate(kernel):
        band[np.arange(n), np.arange(n) + j] = c
    return band


def _all_sign_vectors(length: int) -> np.ndarray:
    codes = np.arange(1 << length)[:, None] >> np.arange(length)[None, :]
    return 2.0 * (codes & 1) - 1.0


def rademacher_smallball_exact(
    n: int,
    X: float,
    t: float,
    delta: float,
    kernel: Sequence[float] = (1.0,),
) -> float:
    """
    Exact P(|S_n(t)| <= delta) for Rademacher innovations.

    With kernel (1,) the coefficients are i.i.d. signs; a longer normalized kernel
    gives the moving average a_k = sum_j c_j eps_{k+j}. The sum over the a-array and
    the b-array are enumerated separately and matched by sorting.

    Args:
        n: Degree (at most 12)
        X: Base point
        t: Window position
        delta: Small-ball radius
        kernel: Moving-average kernel with unit l2 norm

    Returns:
        Probability
    """
    if n < 1:
        raise ValueError("degree must be at least 1")
    if n > MAX_EXACT_DEGREE:
        raise ResourceLimitError(f"exact enumeration is limited to n <= {MAX_EXACT_DEGREE}")
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    c = np.asarray(kernel, dtype=float)
    if abs(float(np.dot(c, c)) - 1.0) > 1e-10:
        raise InvalidModelError("moving-average kernel must have unit l2 norm")
    length = n + len(c) - 1
    if length > MAX_EXACT_INNOVATIONS:
        raise ResourceLimitError(
            f"enumeration over {length} innovations exceeds {MAX_EXACT_INNOVATIONS}"
        )

    k = np.arange(1, n + 1, dtype=float)
    theta = k * (X + t / n)
    band = _band_matrix(c, n)
    load_a = band.T @ (np.cos(theta) / math.sqrt(n))
    load_b = band.T @ (np.sin(theta) / math.sqrt(n))

    signs = _all_sign_vectors(length)
    part_a = signs @ load_a
    part_b = np.sort(signs @ load_b)
    slack = 1e-12 * (1.0 + delta)
    upper = np.searchsorted(part_b, delta - part_a + slack, side="right")
    lower = np.searchsorted(part_b, -delta - part_a - slack, side="left")
    hits = int(np.sum(upper - lower))
    return hits / float(len(part_a)) ** 2
