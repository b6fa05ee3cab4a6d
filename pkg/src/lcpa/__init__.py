"""Learning-centric power allocation (LCPA).

Allocates uplink transmit power to minimize the worst-case modeled
classification error across users instead of maximizing throughput. The
package bundles the channel simulator, the inverse-power error model with its
brute-force fit, the min-max MM solver, the closed-form interference-free
allocator, classical baselines, and a seeded Monte-Carlo experiment harness
with CSV + figure reports.
"""

from .asymptotic import ErrorLevelSolution, power_at_level, solve_asymptotic
from .baselines import max_min_fairness, sum_rate_max, uniform, water_filling
from .channel import (
    ChannelRealization,
    DegenerateChannelError,
    GainMatrix,
    SystemConfig,
    draw_channels,
    gains_from_channels,
    rate,
    rates,
    sample_count,
)
from .config_io import ConfigError, db_to_linear, dbm_to_watts, load_config
from .error_model import (
    FitGridSpec,
    FitPoint,
    FitPointsError,
    InsufficientDataError,
    LearningTask,
    extrapolate,
    fit,
    model_error,
    read_fit_points,
)
from .harness import (
    SCHEMES,
    ExperimentRow,
    ExperimentSpec,
    allocate_scheme,
    derived_seed,
    emit_csv,
    evaluate_allocation,
    run_experiment,
    run_single_draw,
)
from .mm_solver import (
    PowerAllocation,
    SolverOptions,
    SubproblemError,
    SurrogateDomainError,
    SurrogateState,
    phi,
    solve_lcpa,
    solve_subproblem,
    surrogate_phi,
    worst_weighted_error,
)
from .scenarios import two_user_cnn_svm

__version__ = "0.1.0"

__all__ = [
    "ChannelRealization",
    "ConfigError",
    "DegenerateChannelError",
    "ErrorLevelSolution",
    "ExperimentRow",
    "ExperimentSpec",
    "FitGridSpec",
    "FitPoint",
    "FitPointsError",
    "GainMatrix",
    "InsufficientDataError",
    "LearningTask",
    "PowerAllocation",
    "SCHEMES",
    "SolverOptions",
    "SubproblemError",
    "SurrogateDomainError",
    "SurrogateState",
    "SystemConfig",
    "allocate_scheme",
    "db_to_linear",
    "dbm_to_watts",
    "derived_seed",
    "draw_channels",
    "emit_csv",
    "evaluate_allocation",
    "extrapolate",
    "fit",
    "gains_from_channels",
    "load_config",
    "max_min_fairness",
    "model_error",
    "phi",
    "power_at_level",
    "rate",
    "rates",
    "read_fit_points",
    "run_experiment",
    "run_single_draw",
    "sample_count",
    "solve_asymptotic",
    "solve_lcpa",
    "solve_subproblem",
    "sum_rate_max",
    "surrogate_phi",
    "two_user_cnn_svm",
    "uniform",
    "water_filling",
    "worst_weighted_error",
]
