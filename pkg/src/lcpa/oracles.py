"""Brute-force grid oracles for two-user instances.

On the K = 2 simplex every allocation is (p1, P - p1), so exhaustive search
over p1 gives an independent check of the iterative solvers. These run fully
vectorized and are used by the test suite and the ``lcpa oracle`` subcommand.
"""

from __future__ import annotations

import numpy as np

from .channel import GainMatrix, SystemConfig

__all__ = ["lcpa_grid_oracle", "min_rate_grid_oracle", "grid_allocations"]


def grid_allocations(psum: float, step_frac: float) -> np.ndarray:
    """All (2, n) grid allocations with p1 stepped by step_frac * psum."""
    p1 = np.arange(0.0, 1.0 + 0.5 * step_frac, step_frac) * psum
    p1[-1] = psum
    return np.stack([p1, psum - p1])


def _rate_matrix(g: GainMatrix, pts: np.ndarray, sigma2: float) -> np.ndarray:
    gm = g.gains
    total = gm @ pts + sigma2
    interf = total - np.diag(gm)[:, None] * pts
    return np.log2(total / interf)


def lcpa_grid_oracle(g: GainMatrix, config: SystemConfig, tasks,
                     step_frac: float = 1e-4) -> tuple[np.ndarray, float]:
    """Grid minimum of max_k rho_k * Phi_k over the two-user simplex."""
    if config.num_users != 2:
        raise ValueError("grid oracle is defined for K = 2 only")
    pts = grid_allocations(config.total_power_w, step_frac)
    r = _rate_matrix(g, pts, config.noise_power_w)
    a = np.array([[t.a] for t in tasks])
    b = np.array([[t.b] for t in tasks])
    rho = np.array([[t.rho] for t in tasks])
    cb = np.array([[config.bandwidth_hz * config.time_budget_s / t.bits_per_sample] for t in tasks])
    init = np.array([[t.initial_samples] for t in tasks])
    worst = np.max(rho * a * (cb * r + init) ** (-b), axis=0)
    i = int(np.argmin(worst))
    return pts[:, i].copy(), float(worst[i])


def min_rate_grid_oracle(g: GainMatrix, config: SystemConfig,
                         step_frac: float = 1e-4) -> tuple[np.ndarray, float]:
    """Grid maximum of min_k rate_k over the two-user simplex."""
    if config.num_users != 2:
        raise ValueError("grid oracle is defined for K = 2 only")
    pts = grid_allocations(config.total_power_w, step_frac)
    worst = np.min(_rate_matrix(g, pts, config.noise_power_w), axis=0)
    i = int(np.argmax(worst))
    return pts[:, i].copy(), float(worst[i])
