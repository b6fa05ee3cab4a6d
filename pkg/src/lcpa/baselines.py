"""Classical power-allocation baselines: max-min rate fairness, sum-rate
maximization, interference-free water-filling, and the uniform split.

These allocate purely on channel state; none of them sees the learning-curve
parameters, which is exactly why the learning-centric allocator beats them on
worst-case modeled error.
"""

from __future__ import annotations

import numpy as np

from . import _kernels
from .channel import GainMatrix, SystemConfig, rates
from .mm_solver import PowerAllocation

__all__ = ["max_min_fairness", "sum_rate_max", "water_filling", "uniform"]

_LN2 = np.log(2.0)


def _balanced_powers(coupling, noise_over_gain, gamma, psum):
    """Fixed-point solve of the SINR-balance equations at target gamma.

    Returns the balanced power vector, or None when gamma is infeasible
    (iteration exceeds the budget or fails to converge)."""
    p, status = _kernels.maxmin_fixed_point(
        coupling, noise_over_gain, gamma, psum, 1e-13 * psum, 400_000
    )
    return p if status == _kernels.FP_CONVERGED else None


def max_min_fairness(g: GainMatrix, config: SystemConfig, tol: float = 1e-9) -> PowerAllocation:
    """Maximize the minimum user rate via bisection on a common SINR target.

    For each candidate target gamma the linear balance equations
    p_k G_kk = gamma * (sum_{l != k} G_kl p_l + sigma2) are solved by a
    monotone fixed point; gamma is feasible when the balanced powers exist
    within the budget. The final powers are scaled up to spend the whole
    budget (scaling raises every SINR, so the rates stay equalized at best).
    ``objective`` is the achieved minimum rate in bits/s/Hz.
    """
    gm = g.gains
    k = gm.shape[0]
    psum = config.total_power_w
    diag = np.diag(gm)
    if np.any(diag <= 0.0):
        raise ValueError("direct gains must be positive")
    coupling = gm / diag[:, None]
    np.fill_diagonal(coupling, 0.0)
    noise_over_gain = config.noise_power_w / diag

    gamma_hi = 1.0
    for _ in range(200):
        if _balanced_powers(coupling, noise_over_gain, gamma_hi, psum) is None:
            break
        gamma_hi *= 2.0
    else:
        raise RuntimeError("failed to bracket the SINR target")
    gamma_lo = 0.0
    p = np.zeros(k)
    iterations = 0
    while (gamma_hi - gamma_lo) > tol * gamma_hi:
        iterations += 1
        gamma = 0.5 * (gamma_lo + gamma_hi)
        cand = _balanced_powers(coupling, noise_over_gain, gamma, psum)
        if cand is None:
            gamma_hi = gamma
        else:
            gamma_lo = gamma
            p = cand
    if p.sum() <= 0.0:
        # Bracket collapsed before any feasible target was accepted.
        p = _balanced_powers(coupling, noise_over_gain, gamma_lo, psum)
        if p is None:
            raise RuntimeError("max-min bisection found no feasible SINR target")
    p = p * (psum / p.sum())
    min_rate = float(np.min(rates(g, p, config.noise_power_w)))
    return PowerAllocation(powers=p, objective=min_rate, iterations=iterations, converged=True)


def _sum_rate(gm, sigma2, p):
    total = gm @ p + sigma2
    interf = total - np.diag(gm) * p
    return float(np.sum(np.log2(total / interf)))


def sum_rate_max(g: GainMatrix, config: SystemConfig, tol: float = 1e-6,
                 max_outer: int = 100) -> PowerAllocation:
    """Maximize the sum rate by successive convex approximation from uniform.

    Each round keeps the concave log of the total received power and
    linearizes the log of the interference-plus-noise term at the incumbent,
    then solves the concave inner problem on the simplex with the projected
    gradient machinery plus a gradient-equalization polish. The true sum rate
    is nondecreasing across rounds by the minorize-maximize argument.
    ``objective`` is the achieved sum rate in bits/s/Hz.
    """
    gm = g.gains
    k = gm.shape[0]
    sigma2 = config.noise_power_w
    psum = config.total_power_w
    p = np.full(k, psum / k)
    best_rate = _sum_rate(gm, sigma2, p)
    history = [best_rate]
    iterations = 0
    converged = False
    offdiag = gm.copy()
    np.fill_diagonal(offdiag, 0.0)
    for _ in range(max_outer):
        iterations += 1
        interf = offdiag @ p + sigma2
        lin = offdiag.T @ (1.0 / interf)  # gradient of sum_k ln(I_k) at the incumbent
        cand, _val, _it, _conv = _kernels.smooth_simplex_ascent(
            gm, sigma2, lin, p.copy(), psum, 0.05, 20_000, 1e-9, 250
        )
        polished = _gradient_equalize_polish(gm, sigma2, lin, cand, psum)
        if polished is not None:
            def surro(q):
                return float(np.sum(np.log(gm @ q + sigma2)) - lin @ q)

            if surro(polished) >= surro(cand):
                cand = polished
        new_rate = _sum_rate(gm, sigma2, cand)
        if new_rate >= best_rate:
            p, gain = cand, new_rate - best_rate
            best_rate = new_rate
        else:
            gain = 0.0
        history.append(best_rate)
        if gain < tol * max(abs(best_rate), 1e-300):
            converged = True
            break
    return PowerAllocation(powers=p, objective=best_rate, iterations=iterations,
                           converged=converged, objective_history=np.array(history))


def _gradient_equalize_polish(gm, sigma2, lin, p_in, psum):
    """Newton refinement of the concave inner problem.

    KKT: the partial derivatives of sum_k ln(S_k) - lin @ p are equal (to the
    budget multiplier) on the support and no larger off it."""
    k = p_in.shape[0]
    p = p_in.copy()
    support = p > 1e-9 * psum
    if not support.any():
        support[int(np.argmax(p))] = True
    for _round in range(k + 3):
        idx = np.flatnonzero(support)
        m = idx.size
        p_full = np.where(support, p, 0.0)
        for _newton in range(60):
            total = gm @ p_full + sigma2
            grad = gm.T @ (1.0 / total) - lin
            lam = grad[idx].mean()
            res = np.concatenate([grad[idx] - lam, [p_full.sum() - psum]])
            if np.max(np.abs(res[:-1])) <= 1e-12 * max(abs(lam), 1e-300) and \
               abs(res[-1]) <= 1e-13 * psum:
                break
            hess = -(gm[:, idx].T / total**2) @ gm[:, idx]  # d grad_idx / d p_idx
            jac = np.zeros((m + 1, m + 1))
            jac[:m, :m] = hess
            jac[:m, m] = -1.0
            jac[m, :m] = 1.0
            try:
                step = np.linalg.solve(jac, -res)
            except np.linalg.LinAlgError:
                return None
            alpha = 1.0
            for _bt in range(50):
                if np.all(p_full[idx] + alpha * step[:m] > 0.0):
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
        total = gm @ np.where(support, p, 0.0) + sigma2
        grad = gm.T @ (1.0 / total) - lin
        lam = grad[support].mean()
        overshoot = ~support & (grad > lam * (1.0 + 1e-9) + 1e-15)
        if overshoot.any():
            support |= overshoot
            seed = 1e-6 * psum
            p[overshoot] = seed
            keep = support & ~overshoot
            p[keep] *= (psum - seed * overshoot.sum()) / max(p[keep].sum(), 1e-300)
            continue
        break
    p = np.where(support, p, 0.0)
    if np.any(p < 0.0) or p.sum() <= 0.0:
        return None
    return p * (psum / p.sum())


def water_filling(g_diag: np.ndarray, config: SystemConfig) -> PowerAllocation:
    """Interference-free water-filling: p_k = [w - sigma2/G_kk]+ at the budget.

    The water level w = 1/lambda is located by bisection, then recomputed in
    closed form on the resulting active set so the budget is met exactly and
    complementary slackness holds to machine precision. ``objective`` is the
    resulting interference-free sum rate in bits/s/Hz.
    """
    g_diag = np.asarray(g_diag, dtype=float)
    if np.any(g_diag <= 0.0):
        raise ValueError("direct gains must be positive")
    psum = config.total_power_w
    floor = config.noise_power_w / g_diag
    lo, hi = float(floor.min()), float(floor.min()) + psum
    for _ in range(200):
        w = 0.5 * (lo + hi)
        if np.maximum(w - floor, 0.0).sum() > psum:
            hi = w
        else:
            lo = w
    active = floor < 0.5 * (lo + hi)
    w = (psum + floor[active].sum()) / active.sum()
    p = np.where(active, np.maximum(w - floor, 0.0), 0.0)
    obj = float(np.sum(np.log2(1.0 + g_diag * p / config.noise_power_w)))
    return PowerAllocation(powers=p, objective=obj, iterations=200, converged=True)


def uniform(config: SystemConfig) -> PowerAllocation:
    """Uniform split of the budget (also the LCPA solver's starting point)."""
    k = config.num_users
    p = np.full(k, config.total_power_w / k)
    return PowerAllocation(powers=p, objective=float("nan"), iterations=0, converged=True)
