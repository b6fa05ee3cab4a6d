"""Closed-form power allocation for the interference-free (large-array) regime.

With many receive antennas the user channels become orthogonal and the
cross gains vanish, so the min-max problem decouples: at the optimal common
error level mu, every user with positive power needs exactly

    p_k(mu) = [ sigma2/G_kk * exp( D_k ln2 / (B T) * ((mu/(rho_k a_k))**(-1/b_k) - A_k) )
                - sigma2/G_kk ]+

and mu* is fixed by the power budget. Each p_k(mu) is strictly decreasing in
mu wherever positive, so mu* is found by bisection.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import SystemConfig
from .error_model import LearningTask

__all__ = ["ErrorLevelSolution", "power_at_level", "solve_asymptotic"]


@dataclass
class ErrorLevelSolution:
    """Bisection output: optimal error level, per-user powers (W), iteration count."""

    mu_star: float
    powers: np.ndarray
    bisection_iterations: int


def power_at_level(task: LearningTask, g_kk: float, config: SystemConfig, mu: float) -> float:
    """Power needed by one user to reach weighted modeled error mu, ignoring interference."""
    if mu <= 0.0:
        raise ValueError("mu must be > 0")
    if g_kk <= 0.0:
        raise ValueError("g_kk must be > 0")
    if task.a <= 0.0 or task.b <= 0.0:
        raise ValueError("power_at_level requires a > 0 and b > 0")
    v_req = (mu / (task.rho * task.a)) ** (-1.0 / task.b)
    exponent = task.bits_per_sample * np.log(2.0) / (
        config.bandwidth_hz * config.time_budget_s
    ) * (v_req - task.initial_samples)
    base = config.noise_power_w / g_kk
    return float(max(base * np.expm1(exponent), 0.0))


def _total_power(tasks, g_diag, config, mu) -> float:
    return sum(power_at_level(t, gk, config, mu) for t, gk in zip(tasks, g_diag))


def solve_asymptotic(g_diag: np.ndarray, config: SystemConfig, tasks,
                     eps: float = 1e-9, max_iter: int = 200) -> ErrorLevelSolution:
    """Bisection on the error level until the powers absorb the whole budget.

    g_diag are the direct gains G_kk only. The upper bracket is the largest
    zero-extra-data error level max_k rho_k a_k max(A_k, 1)**(-b_k), where all
    powers vanish; the lower bracket halves down from there until the demanded
    power reaches the budget (levels near zero demand unbounded power, so the
    root is always enclosed). Stops when |sum p(mu) - P_sum| <= eps * P_sum.
    """
    g_diag = np.asarray(g_diag, dtype=float)
    if g_diag.ndim != 1 or g_diag.size != config.num_users:
        raise ValueError("g_diag must be the length-K vector of direct gains")
    if np.any(g_diag <= 0.0):
        raise ValueError("direct gains must be positive")
    for t in tasks:
        if t.a <= 0.0 or t.b <= 0.0:
            raise ValueError("all tasks need a > 0 and b > 0")
    psum = config.total_power_w
    mu_hi = max(
        t.rho * t.a * max(t.initial_samples, 1.0) ** (-t.b) for t in tasks
    )
    mu_lo = mu_hi
    for _ in range(4000):
        if _total_power(tasks, g_diag, config, mu_lo) >= psum:
            break
        mu_lo *= 0.5
    else:  # pragma: no cover - the demanded power diverges as mu -> 0
        raise RuntimeError("failed to bracket the error level")
    mu = 0.5 * (mu_lo + mu_hi)
    iterations = 0
    for _ in range(max_iter):
        iterations += 1
        mu = 0.5 * (mu_lo + mu_hi)
        total = _total_power(tasks, g_diag, config, mu)
        if abs(total - psum) <= eps * psum:
            break
        if total > psum:
            mu_lo = mu
        else:
            mu_hi = mu
    else:
        raise RuntimeError(
            f"bisection did not reach eps={eps:g} within {max_iter} iterations"
        )
    powers = np.array([power_at_level(t, gk, config, mu) for t, gk in zip(tasks, g_diag)])
    return ErrorLevelSolution(mu_star=float(mu), powers=powers, bisection_iterations=iterations)
