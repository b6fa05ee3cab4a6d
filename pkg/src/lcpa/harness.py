"""Seeded Monte-Carlo experiment orchestration and CSV emission.

A sweep varies either the time budget or the antenna count, draws ``runs``
independent channels per sweep value (run r uses seed + 1000003 * r, so runs
never share a stream and the same run index sees the same channel at every
time-budget value), allocates power with each requested scheme, and averages
the reported quantities. Reported classification error is the fitted-model
error rho_k * a_k * v_k**(-b_k) at the achieved continuous sample count,
clamped into [0, 1]; sample counts are reported in floor mode. A scheme that
fails on any draw yields a NaN-marked row instead of aborting the sweep.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .asymptotic import solve_asymptotic
from .baselines import max_min_fairness, sum_rate_max, uniform, water_filling
from .channel import GainMatrix, SystemConfig, draw_channels, gains_from_channels, rates, sample_count
from .error_model import LearningTask, model_error
from .mm_solver import PowerAllocation, SolverOptions, solve_lcpa

__all__ = [
    "SCHEMES",
    "ExperimentSpec",
    "ExperimentRow",
    "derived_seed",
    "allocate_scheme",
    "evaluate_allocation",
    "run_experiment",
    "run_single_draw",
    "emit_csv",
]

SCHEMES = ("lcpa_mm", "lcpa_asymptotic", "max_min", "sum_rate", "water_filling", "uniform")

RUN_SEED_STRIDE = 1000003

SWEEP_AXES = ("time_budget_s", "num_antennas")

_CSV_HEADER = "sweep_value,scheme,user,power_mw,modeled_max_error,samples"

_CSV_PREAMBLE = (
    "# worst-case modeled classification error report\n"
    "# modeled_max_error = max_k rho_k * a_k * v_k^-b_k at the achieved continuous\n"
    "# sample count, clamped to [0,1]; it is a model prediction, not the test error\n"
    "# of a retrained classifier. samples is the floor-mode per-user count.\n"
)


def derived_seed(seed: int, run_index: int) -> int:
    """Collision-free per-run seed: seed + 1000003 * run_index."""
    return seed + RUN_SEED_STRIDE * run_index


@dataclass
class ExperimentSpec:
    """One sweep: system config, tasks, schemes, axis/values, runs and seed."""

    config: SystemConfig
    tasks: list
    schemes: tuple
    sweep_axis: str
    sweep_values: tuple
    runs: int
    seed: int

    def __post_init__(self) -> None:
        self.schemes = tuple(self.schemes)
        self.sweep_values = tuple(float(v) for v in self.sweep_values)
        self.runs = int(self.runs)
        self.seed = int(self.seed)
        if not self.schemes:
            raise ValueError("at least one scheme required")
        for s in self.schemes:
            if s not in SCHEMES:
                raise ValueError(f"unknown scheme {s!r}; known: {', '.join(SCHEMES)}")
        if self.sweep_axis not in SWEEP_AXES:
            raise ValueError(f"sweep_axis must be one of {SWEEP_AXES}")
        if not self.sweep_values:
            raise ValueError("sweep_values must be nonempty")
        if any(b <= a for a, b in zip(self.sweep_values, self.sweep_values[1:])):
            raise ValueError("sweep_values must be strictly increasing")
        if self.sweep_axis == "num_antennas":
            for v in self.sweep_values:
                if v != int(v) or v < 1:
                    raise ValueError("num_antennas sweep values must be positive integers")
        if self.runs < 1:
            raise ValueError("runs must be >= 1")


@dataclass
class ExperimentRow:
    """Averages for one (sweep value, scheme) cell. Powers in mW."""

    sweep_value: float
    scheme: str
    mean_powers_mw: np.ndarray
    mean_modeled_max_error: float
    mean_discrete_samples: np.ndarray
    failed: bool = False


def allocate_scheme(scheme: str, g: GainMatrix, config: SystemConfig, tasks,
                    opts: SolverOptions | None = None) -> PowerAllocation:
    """Run one allocation scheme on one channel draw."""
    if scheme == "lcpa_mm":
        return solve_lcpa(g, config, tasks, opts)
    if scheme == "lcpa_asymptotic":
        sol = solve_asymptotic(g.diagonal(), config, tasks)
        return PowerAllocation(powers=sol.powers, objective=sol.mu_star,
                               iterations=sol.bisection_iterations, converged=True)
    if scheme == "max_min":
        return max_min_fairness(g, config)
    if scheme == "sum_rate":
        return sum_rate_max(g, config)
    if scheme == "water_filling":
        return water_filling(g.diagonal(), config)
    if scheme == "uniform":
        return uniform(config)
    raise ValueError(f"unknown scheme {scheme!r}")


def evaluate_allocation(g: GainMatrix, config: SystemConfig, tasks,
                        powers: np.ndarray) -> tuple[float, np.ndarray]:
    """Report-side evaluation of an allocation against the full gain matrix.

    Returns (clamped worst weighted modeled error, floor-mode sample counts).
    """
    r = rates(g, powers, config.noise_power_w)
    worst = max(
        task.rho * model_error(task, sample_count(config, float(r[k]), task, continuous=True))
        for k, task in enumerate(tasks)
    )
    samples = np.array(
        [sample_count(config, float(r[k]), task, continuous=False) for k, task in enumerate(tasks)]
    )
    return float(min(max(worst, 0.0), 1.0)), samples


def run_experiment(spec: ExperimentSpec, opts: SolverOptions | None = None) -> list[ExperimentRow]:
    """Execute the sweep and return one averaged row per (sweep value, scheme)."""
    rows = []
    k = spec.config.num_users
    for value in spec.sweep_values:
        if spec.sweep_axis == "num_antennas":
            cfg = replace(spec.config, num_antennas=int(value))
        else:
            cfg = replace(spec.config, time_budget_s=value)
        power_acc = {s: np.zeros(k) for s in spec.schemes}
        err_acc = {s: 0.0 for s in spec.schemes}
        samp_acc = {s: np.zeros(k) for s in spec.schemes}
        failed = {s: False for s in spec.schemes}
        for run in range(spec.runs):
            g = gains_from_channels(draw_channels(cfg, derived_seed(spec.seed, run)))
            for scheme in spec.schemes:
                if failed[scheme]:
                    continue
                try:
                    alloc = allocate_scheme(scheme, g, cfg, spec.tasks, opts)
                    err, samples = evaluate_allocation(g, cfg, spec.tasks, alloc.powers)
                except (ArithmeticError, ValueError, RuntimeError, np.linalg.LinAlgError):
                    failed[scheme] = True
                    continue
                power_acc[scheme] += alloc.powers
                err_acc[scheme] += err
                samp_acc[scheme] += samples
        for scheme in spec.schemes:
            if failed[scheme]:
                rows.append(ExperimentRow(
                    sweep_value=value, scheme=scheme,
                    mean_powers_mw=np.full(k, np.nan),
                    mean_modeled_max_error=float("nan"),
                    mean_discrete_samples=np.full(k, np.nan),
                    failed=True,
                ))
            else:
                rows.append(ExperimentRow(
                    sweep_value=value, scheme=scheme,
                    mean_powers_mw=1e3 * power_acc[scheme] / spec.runs,
                    mean_modeled_max_error=err_acc[scheme] / spec.runs,
                    mean_discrete_samples=samp_acc[scheme] / spec.runs,
                ))
    return rows


def run_single_draw(config: SystemConfig, tasks, schemes, seed: int,
                    opts: SolverOptions | None = None):
    """One channel draw, all schemes: [(scheme, allocation, error, samples), ...]."""
    g = gains_from_channels(draw_channels(config, seed))
    out = []
    for scheme in schemes:
        alloc = allocate_scheme(scheme, g, config, tasks, opts)
        err, samples = evaluate_allocation(g, config, tasks, alloc.powers)
        out.append((scheme, alloc, err, samples))
    return out


def _fmt(x: float) -> str:
    return f"{x:.10g}"


def emit_csv(rows: list[ExperimentRow], path) -> None:
    """Write one line per (row, user), sorted by (sweep_value, scheme, user).

    Values use 10 significant digits with '.' as decimal point and LF line
    endings, so identical specs yield byte-identical files.
    """
    ordered = sorted(rows, key=lambda r: (r.sweep_value, r.scheme))
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(_CSV_PREAMBLE)
            fh.write(_CSV_HEADER + "\n")
            for row in ordered:
                for user in range(row.mean_powers_mw.shape[0]):
                    fh.write(",".join([
                        _fmt(row.sweep_value),
                        row.scheme,
                        str(user + 1),
                        _fmt(float(row.mean_powers_mw[user])),
                        _fmt(row.mean_modeled_max_error),
                        _fmt(float(row.mean_discrete_samples[user])),
                    ]) + "\n")
    except OSError as exc:
        raise OSError(f"failed writing CSV to {path}: {exc}") from exc
