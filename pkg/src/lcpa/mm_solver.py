"""Min-max power allocation by majorization-minimization.

The problem is to minimize, over the power simplex {p >= 0, sum(p) = P_sum},
the worst weighted modeled classification error

    max_k  rho_k * Phi_k(p),
    Phi_k(p) = a_k * (B*T/D_k * log2(1 + SINR_k(p)) + A_k) ** (-b_k),

which is nonconvex because interference couples the users. Each outer
iteration replaces every Phi_k by a convex surrogate that upper-bounds it and
is tangent at the current iterate (anchor), then solves the resulting convex
min-max subproblem on the simplex. The surrogate keeps the log of the total
received power and linearizes the log of the interference-plus-noise term at
the anchor, which is what yields upper bound, convexity and tangency at once.

The convex subproblem is solved by projected subgradient descent on the
pointwise maximum (normalized diminishing steps, best-iterate tracking),
followed by a Newton polish that equalizes the active branches; the polish is
what pushes the solution to near machine precision, which the cross-solver
consistency checks rely on.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .channel import GainMatrix, SystemConfig
from .error_model import LearningTask

__all__ = [
    "PowerAllocation",
    "SurrogateState",
    "SolverOptions",
    "SubproblemError",
    "SurrogateDomainError",
    "phi",
    "surrogate_phi",
    "solve_subproblem",
    "solve_lcpa",
    "worst_weighted_error",
]

_LN2 = np.log(2.0)


class SubproblemError(RuntimeError):
    """Raised when the convex subproblem solver hits its iteration cap."""


class SurrogateDomainError(ValueError):
    """Raised when a surrogate is evaluated where its braced term is <= 0."""


@dataclass
class PowerAllocation:
    """Solver output: powers in watts plus diagnostics.

    ``objective`` is the achieved max_k rho_k * Phi_k for the LCPA solvers and
    the scheme's own criterion for the baselines (documented per function).
    ``objective_history`` holds the true objective after each outer iteration.
    """

    powers: np.ndarray
    objective: float
    iterations: int
    converged: bool
    objective_history: np.ndarray = field(default_factory=lambda: np.empty(0))


@dataclass
class SurrogateState:
    """Expansion point of the surrogates: anchor powers plus the cached
    per-user interference-plus-noise terms sum_{l != k} G[k,l] anchor_l + sigma2."""

    anchor: np.ndarray
    interference: np.ndarray

    @classmethod
    def at_anchor(cls, g: GainMatrix, config: SystemConfig, anchor: np.ndarray) -> "SurrogateState":
        anchor = np.asarray(anchor, dtype=float)
        if np.any(anchor < 0.0):
            raise ValueError("anchor powers must be nonnegative")
        if abs(anchor.sum() - config.total_power_w) > 1e-6 * config.total_power_w:
            raise ValueError("anchor must lie on the power simplex")
        gm = g.gains
        total = gm @ anchor + config.noise_power_w
        return cls(anchor=anchor.copy(), interference=total - np.diag(gm) * anchor)


@dataclass
class SolverOptions:
    """Tuning knobs for solve_lcpa / solve_subproblem.

    mm_tol stops the outer loop on relative objective decrease; sub_tol is the
    relative improvement threshold of the subgradient best-iterate over one
    stall window. power_cap (watts) adds optional per-user caps via a capped
    simplex projection; the Newton polish is skipped in that mode, so accuracy
    is then limited by the subgradient phase.
    """

    mm_tol: float = 1e-6
    mm_max_iter: int = 50
    sub_tol: float = 1e-6
    sub_max_iter: int = 50_000
    step_scale: float = 0.05
    stall_window: int = 500
    power_cap: float | None = None
    polish: bool = True


def _task_arrays(tasks: list[LearningTask], config: SystemConfig):
    if len(tasks) != config.num_users:
        raise ValueError(f"expected {config.num_users} tasks, got {len(tasks)}")
    a = np.array([t.a for t in tasks], dtype=float)
    b = np.array([t.b for t in tasks], dtype=float)
    rho = np.array([t.rho for t in tasks], dtype=float)
    d = np.array([t.bits_per_sample for t in tasks], dtype=float)
    init = np.array([t.initial_samples for t in tasks], dtype=float)
    bt = config.bandwidth_hz * config.time_budget_s
    return a, b, rho, bt / d, init  # cb = B*T/D (bits-to-samples per unit rate)


def _phi_values(g: GainMatrix, config: SystemConfig, tasks, p: np.ndarray) -> np.ndarray:
    """Unweighted Phi_k(p) for all users."""
    a, b, _, cb, init = _task_arrays(tasks, config)
    gm = g.gains
    p = np.asarray(p, dtype=float)
    total = gm @ p + config.noise_power_w
    interf = total - np.diag(gm) * p
    bracket = cb * np.log2(total / interf) + init
    if np.any(bracket <= 0.0):
        bad = int(np.flatnonzero(bracket <= 0.0)[0])
        raise ValueError(
            f"error-model argument of user {bad} is nonpositive "
            "(zero rate with zero initial samples)"
        )
    return a * bracket ** (-b)


def phi(g: GainMatrix, config: SystemConfig, tasks, p: np.ndarray, k: int) -> float:
    """Modeled (unweighted) classification error of user k at power vector p."""
    return float(_phi_values(g, config, tasks, p)[k])


def worst_weighted_error(g: GainMatrix, config: SystemConfig, tasks, p: np.ndarray) -> float:
    """The LCPA objective max_k rho_k * Phi_k(p)."""
    rho = np.array([t.rho for t in tasks], dtype=float)
    return float(np.max(rho * _phi_values(g, config, tasks, p)))


def _surrogate_values(state, g, config, tasks, p, with_grads=False):
    """Unweighted surrogate values (and optionally gradients) at p.

    Out-of-domain branches (brace <= 0) evaluate to +inf; their gradient rows
    are not meaningful and are returned as zeros.
    """
    a, b, _, cb, init = _task_arrays(tasks, config)
    cr = cb / _LN2
    gm = g.gains
    p = np.asarray(p, dtype=float)
    istar = state.interference
    total = gm @ p + config.noise_power_w
    interf = total - np.diag(gm) * p
    brace = cr * (np.log(total) - interf / istar - np.log(istar) + 1.0) + init
    ok = brace > 0.0
    vals = np.full(brace.shape, np.inf)
    vals[ok] = a[ok] * brace[ok] ** (-b[ok])
    if not with_grads:
        return vals
    offdiag = gm / istar[:, None]
    np.fill_diagonal(offdiag, 0.0)
    dbrace = cr[:, None] * (gm / total[:, None] - offdiag)
    grads = np.zeros_like(gm)
    grads[ok] = (-a[ok] * b[ok] * brace[ok] ** (-b[ok] - 1.0))[:, None] * dbrace[ok]
    return vals, grads


def surrogate_phi(state: SurrogateState, g: GainMatrix, config: SystemConfig,
                  tasks, p: np.ndarray, k: int) -> float:
    """Convex surrogate of Phi_k around state.anchor, evaluated at p."""
    val = _surrogate_values(state, g, config, tasks, p)[k]
    if not np.isfinite(val):
        raise SurrogateDomainError(
            f"surrogate of user {k} evaluated outside its domain (braced term <= 0)"
        )
    return float(val)


def _equalization_polish(state, g, config, tasks, rho, p_in, psum):
    """Newton refinement of the subproblem solution.

    At the minimax optimum every user with positive power attains the common
    weighted surrogate level t. Solve F_k(p) = t on the support plus the
    budget equation by a damped Newton method with active-set updates, and
    return None if anything degenerates so the caller keeps the subgradient
    iterate.
    """
    k = p_in.shape[0]
    p = p_in.copy()
    support = p > 1e-7 * psum
    if not support.any():
        support[int(np.argmax(p))] = True

    def weighted_vals_grads(pvec):
        vals, grads = _surrogate_values(state, g, config, tasks, pvec, with_grads=True)
        return rho * vals, rho[:, None] * grads

    for _round in range(k + 3):
        idx = np.flatnonzero(support)
        m = idx.size
        p_full = np.where(support, p, 0.0)
        for _newton in range(60):
            vals, grads = weighted_vals_grads(p_full)
            if not np.all(np.isfinite(vals[idx])):
                return None
            t = vals[idx].max()
            res = np.concatenate([vals[idx] - t, [p_full.sum() - psum]])
            if np.max(np.abs(res[:-1])) <= 1e-12 * t and abs(res[-1]) <= 1e-13 * psum:
                break
            jac = np.zeros((m + 1, m + 1))
            jac[:m, :m] = grads[np.ix_(idx, idx)]
            jac[:m, m] = -1.0
            jac[m, :m] = 1.0
            try:
                step = np.linalg.solve(jac, -res)
            except np.linalg.LinAlgError:
                return None
            alpha = 1.0
            for _bt in range(50):
                cand = p_full[idx] + alpha * step[:m]
                if np.all(cand > 0.0):
                    trial = np.zeros(k)
                    trial[idx] = cand
                    if np.all(np.isfinite(weighted_vals_grads(trial)[0][idx])):
                        break
                alpha *= 0.5
            else:
                return None
            p_full[idx] += alpha * step[:m]
        p = p_full
        dropped = support & (p <= 0.0)
        if dropped.any():
            p[dropped] = 0.0
            support &= ~dropped
            continue
        # Users outside the support must not exceed the equalized level.
        vals, _ = weighted_vals_grads(np.where(support, p, 0.0))
        t = vals[support].max()
        overshoot = ~support & (vals > t * (1.0 + 1e-9))
        if overshoot.any():
            support |= overshoot
            # Seed the newcomers with a sliver of power so the Newton system
            # is nondegenerate, funded pro rata from the current support.
            seed = 1e-6 * psum
            p[overshoot] = seed
            p[~overshoot & support] *= (psum - seed * overshoot.sum()) / max(
                p[~overshoot & support].sum(), 1e-300
            )
            continue
        break
    p = np.where(support, p, 0.0)
    if np.any(p < 0.0) or p.sum() <= 0.0:
        return None
    p *= psum / p.sum()
    return p


def solve_subproblem(state: SurrogateState, g: GainMatrix, config: SystemConfig,
                     tasks, tol: float | None = None,
                     opts: SolverOptions | None = None) -> np.ndarray:
    """Minimize max_k rho_k * surrogate_k(p | anchor) over the power simplex.

    Warm-starts at the anchor so the returned point never exceeds the
    anchor's surrogate value, which is what guarantees outer-loop descent.
    Raises SubproblemError if the subgradient phase hits its iteration cap
    without meeting the stall criterion.
    """
    opts = opts or SolverOptions()
    sub_tol = opts.sub_tol if tol is None else float(tol)
    if sub_tol <= 0.0:
        raise ValueError("tol must be > 0")
    a, b, rho, cb, init = _task_arrays(tasks, config)
    psum = config.total_power_w
    cap = -1.0 if opts.power_cap is None else float(opts.power_cap)
    best_p, best, _iters, converged = _kernels.minimax_subgradient(
        g.gains, config.noise_power_w, cb / _LN2, init, a, b, rho,
        state.interference, state.anchor.copy(), psum, cap,
        opts.step_scale, opts.sub_max_iter, sub_tol, opts.stall_window,
    )
    if not converged:
        raise SubproblemError(
            f"subproblem did not meet tol={sub_tol:g} within {opts.sub_max_iter} iterations"
        )
    if opts.polish and opts.power_cap is None:
        polished = _equalization_polish(state, g, config, tasks, rho, best_p, psum)
        if polished is not None:
            vals = _surrogate_values(state, g, config, tasks, polished)
            if np.all(np.isfinite(vals)) and np.max(rho * vals) <= best * (1.0 + 1e-10):
                return polished
    return best_p


def solve_lcpa(g: GainMatrix, config: SystemConfig, tasks,
               opts: SolverOptions | None = None) -> PowerAllocation:
    """Full MM loop: uniform start, surrogate subproblems until the true
    objective max_k rho_k * Phi_k stalls (relative decrease < mm_tol) or the
    iteration cap is reached."""
    opts = opts or SolverOptions()
    k = config.num_users
    psum = config.total_power_w
    if opts.power_cap is not None and k * opts.power_cap < psum * (1.0 - 1e-12):
        raise ValueError("per-user power cap makes the budget infeasible")
    p = np.full(k, psum / k)
    if opts.power_cap is not None:
        p = _kernels.project_capped_simplex(p, psum, float(opts.power_cap))
    obj = worst_weighted_error(g, config, tasks, p)
    history = [obj]
    converged = False
    iterations = 0
    for _ in range(opts.mm_max_iter):
        state = SurrogateState.at_anchor(g, config, p)
        p_new = solve_subproblem(state, g, config, tasks, opts=opts)
        new_obj = worst_weighted_error(g, config, tasks, p_new)
        iterations += 1
        history.append(new_obj)
        rel_drop = (obj - new_obj) / max(obj, 1e-300)
        p, obj = p_new, new_obj
        if abs(rel_drop) < opts.mm_tol:
            converged = True
            break
    return PowerAllocation(
        powers=p,
        objective=obj,
        iterations=iterations,
        converged=converged,
        objective_history=np.array(history),
    )
