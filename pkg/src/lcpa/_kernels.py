"""Numba-compiled inner loops shared by the power-allocation solvers.

Everything here operates on plain float64 arrays in watts. The public solver
modules own validation, wrapping and the Newton polish steps; these kernels
only run the iteration-heavy parts (projected subgradient descent/ascent and
the max-min fixed point), which would dominate the Monte-Carlo harness if
written in pure numpy.
"""

from __future__ import annotations

import numpy as np
from numba import njit

# Fixed-point iteration status codes (max-min power balancing).
FP_CONVERGED = 0
FP_BUDGET_EXCEEDED = 1
FP_NO_CONVERGENCE = 2


@njit(cache=True)
def project_simplex(v, psum):
    """Euclidean projection onto {p >= 0, sum(p) = psum}."""
    k = v.shape[0]
    u = np.sort(v)[::-1]
    css = 0.0
    tau = 0.0
    for j in range(k):
        css += u[j]
        t = (psum - css) / (j + 1)
        if u[j] + t > 0.0:
            tau = t
    w = v + tau
    for j in range(k):
        if w[j] < 0.0:
            w[j] = 0.0
    return w


@njit(cache=True)
def project_capped_simplex(v, psum, cap):
    """Euclidean projection onto {0 <= p <= cap, sum(p) = psum} by bisection.

    Requires k * cap >= psum; the caller checks feasibility.
    """
    k = v.shape[0]
    lo = v.min() - cap
    hi = v.max()
    for _ in range(200):
        tau = 0.5 * (lo + hi)
        s = 0.0
        for j in range(k):
            w = v[j] - tau
            if w < 0.0:
                w = 0.0
            elif w > cap:
                w = cap
            s += w
        if s > psum:
            lo = tau
        else:
            hi = tau
    tau = 0.5 * (lo + hi)
    out = np.empty(k)
    for j in range(k):
        w = v[j] - tau
        if w < 0.0:
            w = 0.0
        elif w > cap:
            w = cap
        out[j] = w
    return out


@njit(cache=True)
def minimax_subgradient(gm, sigma2, cr, init_samples, a, b, rho, istar, p0, psum,
                        cap, step_scale, max_iter, tol, check_every):
    """Projected subgradient descent on max_k rho_k * surrogate_k over the simplex.

    Surrogate branch k at power vector p, with anchor interference istar[k]:

        brace_k = cr_k * (ln(S_k) - I_k / istar_k - ln(istar_k) + 1) + A_k
        value_k = rho_k * a_k * brace_k ** (-b_k)

    where S_k = sum_l gm[k,l] p_l + sigma2 and I_k = S_k - gm[k,k] p_k.
    A nonpositive brace means the point left the surrogate's domain; the
    branch value is treated as +inf and the step climbs back along the brace
    gradient. Steps are normalized with magnitude step_scale * psum / sqrt(i);
    the best (lowest max) iterate is tracked and returned. Stops early once
    the best value improves by less than tol (relative) over a check window.

    cap <= 0 disables the per-user power cap. Returns
    (best_p, best_value, iterations, converged_flag).
    """
    k = p0.shape[0]
    p = p0.copy()
    best_p = p0.copy()
    ln_istar = np.log(istar)
    grad = np.empty(k)
    best = np.inf
    last_best = np.inf
    iters = 0
    converged = 0
    for it in range(1, max_iter + 1):
        iters = it
        worst = -np.inf
        kw = 0
        domain_bad = False
        s_w = 0.0
        brace_w = 0.0
        for kk in range(k):
            s = sigma2
            for ll in range(k):
                s += gm[kk, ll] * p[ll]
            interf = s - gm[kk, kk] * p[kk]
            brace = cr[kk] * (np.log(s) - interf / istar[kk] - ln_istar[kk] + 1.0) + init_samples[kk]
            if brace <= 0.0:
                if not domain_bad or brace < brace_w:
                    domain_bad = True
                    kw = kk
                    brace_w = brace
                    s_w = s
            elif not domain_bad:
                val = rho[kk] * a[kk] * brace ** (-b[kk])
                if val > worst:
                    worst = val
                    kw = kk
                    brace_w = brace
                    s_w = s
        if not domain_bad:
            if worst < best:
                best = worst
                for j in range(k):
                    best_p[j] = p[j]
            coef = -rho[kw] * a[kw] * b[kw] * brace_w ** (-b[kw] - 1.0) * cr[kw]
            for j in range(k):
                off = 0.0 if j == kw else gm[kw, j] / istar[kw]
                grad[j] = coef * (gm[kw, j] / s_w - off)
        else:
            # Out of domain: descend on -brace to re-enter it.
            for j in range(k):
                off = 0.0 if j == kw else gm[kw, j] / istar[kw]
                grad[j] = -cr[kw] * (gm[kw, j] / s_w - off)
        gn = 0.0
        for j in range(k):
            gn += grad[j] * grad[j]
        gn = np.sqrt(gn)
        if gn == 0.0:
            converged = 1
            break
        step = step_scale * psum / np.sqrt(it)
        for j in range(k):
            p[j] -= step * grad[j] / gn
        if cap > 0.0:
            p = project_capped_simplex(p, psum, cap)
        else:
            p = project_simplex(p, psum)
        if it % check_every == 0 and np.isfinite(best):
            if np.isfinite(last_best) and last_best - best < tol * best:
                converged = 1
                break
            last_best = best
    return best_p, best, iters, converged


@njit(cache=True)
def maxmin_fixed_point(coupling, noise_over_gain, gamma, psum, tol, max_iter):
    """Monotone fixed point p <- gamma * (coupling @ p + noise_over_gain) from p = 0.

    Solves the SINR-balance equations for a common target gamma. The iteration
    increases componentwise, so the budget test is conclusive the moment the
    running sum exceeds psum. Returns (p, status).
    """
    k = noise_over_gain.shape[0]
    p = np.zeros(k)
    p_new = np.empty(k)
    for _ in range(max_iter):
        delta = 0.0
        total = 0.0
        for i in range(k):
            acc = noise_over_gain[i]
            for j in range(k):
                acc += coupling[i, j] * p[j]
            acc *= gamma
            p_new[i] = acc
            d = acc - p[i]
            if d > delta:
                delta = d
            total += acc
        for i in range(k):
            p[i] = p_new[i]
        if total > psum:
            return p, FP_BUDGET_EXCEEDED
        if delta <= tol:
            return p, FP_CONVERGED
    return p, FP_NO_CONVERGENCE


@njit(cache=True)
def smooth_simplex_ascent(gm, sigma2, lin, p0, psum, step_scale, max_iter, tol, check_every):
    """Projected gradient ascent of sum_k ln(S_k(p)) - lin @ p over the simplex.

    Same normalized diminishing-step scheme and best-iterate tracking as
    minimax_subgradient, specialized to the smooth concave inner problem of
    the sum-rate baseline. Returns (best_p, best_value, iterations, converged).
    """
    k = p0.shape[0]
    p = p0.copy()
    best_p = p0.copy()
    grad = np.empty(k)
    s_vec = np.empty(k)
    best = -np.inf
    last_best = -np.inf
    iters = 0
    converged = 0
    for it in range(1, max_iter + 1):
        iters = it
        val = 0.0
        for kk in range(k):
            s = sigma2
            for ll in range(k):
                s += gm[kk, ll] * p[ll]
            s_vec[kk] = s
            val += np.log(s)
        for j in range(k):
            val -= lin[j] * p[j]
        if val > best:
            best = val
            for j in range(k):
                best_p[j] = p[j]
        gn = 0.0
        for j in range(k):
            acc = -lin[j]
            for kk in range(k):
                acc += gm[kk, j] / s_vec[kk]
            grad[j] = acc
            gn += acc * acc
        gn = np.sqrt(gn)
        if gn == 0.0:
            converged = 1
            break
        step = step_scale * psum / np.sqrt(it)
        for j in range(k):
            p[j] += step * grad[j] / gn
        p = project_simplex(p, psum)
        if it % check_every == 0 and np.isfinite(best):
            if np.isfinite(last_best) and best - last_best < tol * abs(best):
                converged = 1
                break
            last_best = best
    return best_p, best, iters, converged
