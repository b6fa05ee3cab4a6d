"""Inverse-power classification-error model and its brute-force least-squares fit.

The model is err(v) = a * v**(-b) for a training-set size v, with a, b >= 0.
Parameters are fitted to observed (sample size, error) pairs by exhaustive
grid search on the mean squared error, followed by refinement rounds on a
finer local grid. The model is strictly decreasing in v with diminishing
slope whenever a, b > 0, which is what makes it usable as a power-allocation
objective.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "LearningTask",
    "FitPoint",
    "FitGridSpec",
    "InsufficientDataError",
    "FitGridError",
    "FitPointsError",
    "model_error",
    "fit",
    "extrapolate",
    "read_fit_points",
]


class InsufficientDataError(ValueError):
    """Raised when a fit is attempted on fewer than two distinct sample sizes."""


class FitGridError(ValueError):
    """Raised when the fit search grid contains no candidate points."""


class FitPointsError(ValueError):
    """Raised on malformed fit-point CSV input; message names the offending line."""


@dataclass
class LearningTask:
    """Per-user learning-curve parameters.

    a, b parameterize the error model a * v**(-b); rho >= 1 inflates the
    modeled error to absorb fitting mismatch; bits_per_sample is the payload
    D_k of one training sample; initial_samples is the number A_k of samples
    already present before any transmission.
    """

    a: float
    b: float
    rho: float = 1.0
    bits_per_sample: int = 1
    initial_samples: float = 0.0

    def __post_init__(self) -> None:
        self.a = float(self.a)
        self.b = float(self.b)
        self.rho = float(self.rho)
        self.bits_per_sample = int(self.bits_per_sample)
        self.initial_samples = float(self.initial_samples)
        if self.a < 0.0:
            raise ValueError("a must be >= 0")
        if self.b < 0.0:
            raise ValueError("b must be >= 0")
        if self.rho < 1.0:
            raise ValueError("rho must be >= 1")
        if self.bits_per_sample < 1:
            raise ValueError("bits_per_sample must be >= 1")
        if self.initial_samples < 0.0:
            raise ValueError("initial_samples must be >= 0")


@dataclass
class FitPoint:
    """One observed (sample size, classification error) pair."""

    sample_size: float
    observed_error: float

    def __post_init__(self) -> None:
        self.sample_size = float(self.sample_size)
        self.observed_error = float(self.observed_error)
        if self.sample_size <= 0.0:
            raise ValueError("sample_size must be > 0")
        if not (0.0 <= self.observed_error <= 1.0):
            raise ValueError("observed_error must lie in [0, 1]")


@dataclass
class FitGridSpec:
    """Search grid for the brute-force fit.

    The coarse pass scans a in [0, a_max] and b in [0, b_max] with the given
    steps; each refinement round then rescans within one (previous) step of
    the incumbent at ``refine_factor`` times finer resolution. Ties break
    toward smaller b, then smaller a, so results are deterministic.
    """

    a_max: float = 100.0
    a_step: float = 0.1
    b_max: float = 3.0
    b_step: float = 0.01
    refine_factor: int = 10
    refine_rounds: int = 1

    def __post_init__(self) -> None:
        if self.a_step <= 0.0 or self.b_step <= 0.0:
            raise FitGridError("grid steps must be > 0")
        if self.a_max < 0.0 or self.b_max < 0.0:
            raise FitGridError("grid bounds must be >= 0")
        if self.refine_factor < 2 or self.refine_rounds < 0:
            raise FitGridError("refine_factor must be >= 2 and refine_rounds >= 0")


def model_error(task: LearningTask, v: float, weighted: bool = False) -> float:
    """Modeled classification error a * v**(-b); multiplied by rho if weighted.

    Values above 1 are possible at very small v and are intentionally not
    clamped here: clamping is a reporting concern and would break the
    structure the solvers rely on.
    """
    if v <= 0.0:
        raise ValueError(f"sample size must be > 0, got {v}")
    out = task.a * float(v) ** (-task.b)
    return task.rho * out if weighted else out


def extrapolate(task: LearningTask, v_future: float) -> float:
    """Unweighted model prediction at a sample size outside the fitted range."""
    return model_error(task, v_future, weighted=False)


def _grid_axis(lo: float, hi: float, step: float) -> np.ndarray:
    n = int(round((hi - lo) / step)) + 1
    return lo + step * np.arange(max(n, 1))


def _grid_search(v: np.ndarray, y: np.ndarray, a_vals: np.ndarray, b_vals: np.ndarray):
    """Exhaustive MSE scan; first flat minimum = smallest b, then smallest a."""
    if a_vals.size == 0 or b_vals.size == 0:
        raise FitGridError("empty search grid")
    # mse(a, b) = c0 - 2 a c1(b) + a^2 c2(b), so scan b rows against all a at once.
    q = v.size
    u = np.exp(np.outer(-b_vals, np.log(v)))  # (B, Q) = v**-b
    c0 = float(y @ y) / q
    c1 = (u @ y) / q  # (B,)
    c2 = np.einsum("bq,bq->b", u, u) / q  # (B,)
    mse = c0 - 2.0 * np.outer(c1, a_vals) + np.outer(c2, a_vals**2)  # (B, A)
    flat = int(np.argmin(mse))
    bi, ai = divmod(flat, a_vals.size)
    return float(a_vals[ai]), float(b_vals[bi]), float(mse[bi, ai])


def fit(points: list[FitPoint], grid: FitGridSpec | None = None) -> tuple[float, float, float]:
    """Fit (a, b) to observed learning-curve points by coarse-to-fine grid search.

    Minimizes (1/Q) * sum_i |err_i - a * v_i**(-b)|^2 subject to a, b >= 0.
    Returns (a, b, mse) at the best grid point of the final round.
    """
    if grid is None:
        grid = FitGridSpec()
    v = np.array([p.sample_size for p in points], dtype=float)
    y = np.array([p.observed_error for p in points], dtype=float)
    if np.unique(v).size < 2:
        raise InsufficientDataError(
            f"need at least 2 points with distinct sample sizes, got {np.unique(v).size}"
        )
    a_step, b_step = grid.a_step, grid.b_step
    a_best, b_best, mse = _grid_search(
        v, y, _grid_axis(0.0, grid.a_max, a_step), _grid_axis(0.0, grid.b_max, b_step)
    )
    for _ in range(grid.refine_rounds):
        a_lo = max(0.0, a_best - a_step)
        b_lo = max(0.0, b_best - b_step)
        a_fine = _grid_axis(a_lo, a_best + a_step, a_step / grid.refine_factor)
        b_fine = _grid_axis(b_lo, b_best + b_step, b_step / grid.refine_factor)
        a_best, b_best, mse = _grid_search(v, y, a_fine, b_fine)
        a_step /= grid.refine_factor
        b_step /= grid.refine_factor
    return a_best, b_best, mse


def read_fit_points(path) -> list[FitPoint]:
    """Load fit points from a two-column CSV ``sample_size,error`` (header required)."""
    with open(path, encoding="utf-8", newline="") as fh:
        lines = fh.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise FitPointsError(f"{path}:1: empty file, expected header 'sample_size,error'")
    header = lines[0].strip().rstrip("\r")
    if header != "sample_size,error":
        raise FitPointsError(f"{path}:1: expected header 'sample_size,error', got {header!r}")
    points = []
    for lineno, raw in enumerate(lines[1:], start=2):
        line = raw.strip().rstrip("\r")
        if not line:
            continue
        fields = line.split(",")
        if len(fields) != 2:
            raise FitPointsError(f"{path}:{lineno}: expected 2 comma-separated fields, got {len(fields)}")
        try:
            size, err = float(fields[0]), float(fields[1])
        except ValueError as exc:
            raise FitPointsError(f"{path}:{lineno}: non-numeric field ({exc})") from None
        try:
            points.append(FitPoint(sample_size=size, observed_error=err))
        except ValueError as exc:
            raise FitPointsError(f"{path}:{lineno}: {exc}") from None
    return points
