"""Figure rendering for the report paths (sweep curves, learning-curve fits).

Uses the Agg backend so figures render headless to files next to the CSV.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["save_sweep_figure", "save_fit_figure"]

_AXIS_LABELS = {
    "time_budget_s": "transmission time budget T (s)",
    "num_antennas": "number of receive antennas N",
}

_MARKERS = ("o", "s", "^", "v", "d", "x")


def save_sweep_figure(rows, sweep_axis: str, path) -> None:
    """Worst-case modeled error versus the sweep axis, one curve per scheme."""
    schemes = sorted({r.scheme for r in rows})
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for i, scheme in enumerate(schemes):
        pts = sorted((r.sweep_value, r.mean_modeled_max_error)
                     for r in rows if r.scheme == scheme)
        x = [p[0] for p in pts]
        y = [p[1] for p in pts]
        ax.plot(x, y, marker=_MARKERS[i % len(_MARKERS)], label=scheme)
    ax.set_xlabel(_AXIS_LABELS.get(sweep_axis, sweep_axis))
    ax.set_ylabel("worst-case modeled classification error")
    ax.grid(True, alpha=0.4)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_fit_figure(points, a: float, b: float, path) -> None:
    """Observed learning-curve points with the fitted a * v**-b overlay."""
    v = np.array([p.sample_size for p in points])
    y = np.array([p.observed_error for p in points])
    grid = np.geomspace(v.min(), v.max(), 200)
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.loglog(v, y, "o", label="observed")
    ax.loglog(grid, a * grid ** (-b), "-", label=f"fit a={a:.4g}, b={b:.4g}")
    ax.set_xlabel("training sample size")
    ax.set_ylabel("classification error")
    ax.grid(True, which="both", alpha=0.4)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
