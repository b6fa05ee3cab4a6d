"""Command-line front end.

Subcommands:
  fit       fit error-model parameters to a learning-curve CSV
  allocate  run every requested scheme on a single channel draw
  sweep     Monte-Carlo sweep over T or N; writes CSV and a figure
  oracle    compare the iterative solvers against the K=2 grid oracles

Exits 0 on success, 1 with a one-line diagnostic on stderr otherwise.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .channel import GainMatrix, draw_channels, gains_from_channels
from .config_io import ConfigError, load_config
from .error_model import FitGridSpec, fit, read_fit_points
from .harness import (
    SCHEMES,
    SWEEP_AXES,
    ExperimentSpec,
    allocate_scheme,
    derived_seed,
    emit_csv,
    run_experiment,
    run_single_draw,
)
from .oracles import lcpa_grid_oracle
from .scenarios import two_user_cnn_svm


def _load_scenario(config_path):
    if config_path is None:
        return two_user_cnn_svm()
    return load_config(config_path)


def _parse_schemes(arg: str):
    schemes = tuple(s.strip() for s in arg.split(",") if s.strip())
    for s in schemes:
        if s not in SCHEMES:
            raise ValueError(f"unknown scheme {s!r}; known: {', '.join(SCHEMES)}")
    return schemes


def _cmd_fit(args) -> int:
    points = read_fit_points(args.points)
    grid = FitGridSpec(a_max=args.a_max, a_step=args.a_step,
                       b_max=args.b_max, b_step=args.b_step)
    a, b, mse = fit(points, grid)
    print(f"a={a:.10g} b={b:.10g} mse={mse:.10g}")
    if args.plot_out:
        from . import plots

        plots.save_fit_figure(points, a, b, args.plot_out)
        print(f"figure written to {args.plot_out}")
    return 0


def _cmd_allocate(args) -> int:
    config, tasks = _load_scenario(args.config)
    schemes = _parse_schemes(args.schemes)
    results = run_single_draw(config, tasks, schemes, args.seed)
    k = config.num_users
    header = "scheme".ljust(16) + "".join(f"p{u + 1} (mW)".rjust(14) for u in range(k))
    print(header + "worst modeled error".rjust(22))
    for scheme, alloc, err, _samples in results:
        cells = "".join(f"{1e3 * p:14.6f}" for p in alloc.powers)
        print(scheme.ljust(16) + cells + f"{err:22.6g}")
    return 0


def _cmd_sweep(args) -> int:
    config, tasks = _load_scenario(args.config)
    spec = ExperimentSpec(
        config=config,
        tasks=tasks,
        schemes=_parse_schemes(args.schemes),
        sweep_axis=args.sweep_axis,
        sweep_values=tuple(float(v) for v in args.sweep_values.split(",") if v.strip()),
        runs=args.runs,
        seed=args.seed,
    )
    rows = run_experiment(spec)
    emit_csv(rows, args.out)
    print(f"wrote {args.out}")
    if not args.no_plot:
        from . import plots

        fig_path = Path(args.out).with_suffix(".png")
        plots.save_sweep_figure(rows, spec.sweep_axis, fig_path)
        print(f"wrote {fig_path}")
    return 0


def _cmd_oracle(args) -> int:
    config, tasks = _load_scenario(args.config)
    if config.num_users != 2:
        raise ValueError("the grid oracle needs a two-user scenario")
    config = replace(config, num_antennas=args.antennas)
    worst_gap = 0.0
    worst_diag = 0.0
    for i in range(args.instances):
        g = gains_from_channels(draw_channels(config, derived_seed(args.seed, i)))
        alloc = allocate_scheme("lcpa_mm", g, config, tasks)
        _p, obj_grid = lcpa_grid_oracle(g, config, tasks)
        gap = alloc.objective - obj_grid
        worst_gap = max(worst_gap, abs(gap))
        g_diag = GainMatrix(gains=np.diag(g.diagonal()))
        mm = allocate_scheme("lcpa_mm", g_diag, config, tasks)
        asym = allocate_scheme("lcpa_asymptotic", g_diag, config, tasks)
        diag_gap = float(np.max(np.abs(mm.powers - asym.powers))) / config.total_power_w
        worst_diag = max(worst_diag, diag_gap)
        print(
            f"instance {i:3d}: mm-vs-grid objective gap {gap:+.3e}, "
            f"diagonal mm-vs-analytical power gap {diag_gap:.3e} (of budget)"
        )
    print(f"max |mm - grid| objective gap: {worst_gap:.3e}")
    print(f"max diagonal power gap (fraction of budget): {worst_diag:.3e}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lcpa",
        description="Learning-centric power allocation experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_fit = sub.add_parser("fit", help="fit error-model parameters to a CSV of fit points")
    p_fit.add_argument("--points", required=True, help="CSV with header 'sample_size,error'")
    p_fit.add_argument("--a-max", type=float, default=100.0)
    p_fit.add_argument("--a-step", type=float, default=0.1)
    p_fit.add_argument("--b-max", type=float, default=3.0)
    p_fit.add_argument("--b-step", type=float, default=0.01)
    p_fit.add_argument("--plot-out", default=None, help="optional figure path")
    p_fit.set_defaults(func=_cmd_fit)

    p_alloc = sub.add_parser("allocate", help="single-draw allocation for each scheme")
    p_alloc.add_argument("--config", default=None, help="INI config (default: built-in two-user scenario)")
    p_alloc.add_argument("--seed", type=int, default=0)
    p_alloc.add_argument("--schemes", default=",".join(SCHEMES))
    p_alloc.set_defaults(func=_cmd_allocate)

    p_sweep = sub.add_parser("sweep", help="Monte-Carlo sweep; writes CSV and figure")
    p_sweep.add_argument("--config", default=None, help="INI config (default: built-in two-user scenario)")
    p_sweep.add_argument("--out", required=True, help="output CSV path")
    p_sweep.add_argument("--seed", type=int, default=0)
    p_sweep.add_argument("--runs", type=int, default=10)
    p_sweep.add_argument("--schemes", default=",".join(SCHEMES))
    p_sweep.add_argument("--sweep-axis", choices=SWEEP_AXES, default="time_budget_s")
    p_sweep.add_argument("--sweep-values", default="5,10,15,20")
    p_sweep.add_argument("--no-plot", action="store_true", help="skip the PNG figure")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_oracle = sub.add_parser("oracle", help="grid-oracle comparison on random two-user draws")
    p_oracle.add_argument("--config", default=None)
    p_oracle.add_argument("--instances", type=int, default=20)
    p_oracle.add_argument("--seed", type=int, default=0)
    p_oracle.add_argument("--antennas", type=int, default=4)
    p_oracle.set_defaults(func=_cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, ConfigError, OSError, RuntimeError) as exc:
        print(f"lcpa: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
