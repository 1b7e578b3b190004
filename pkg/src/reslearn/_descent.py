"""Projected-descent engine shared by the least-squares and penalty solvers.

The engine knows nothing about resistances. It iterates

    w  <-  max(w - eta * g, 0)

with Armijo backtracking on eta, where the objective callback may
return +inf to veto a candidate (the solvers use that to reject
iterates whose graph is disconnected). An optional block sampler turns
the step into masked block coordinate descent.
"""

import time

import numpy as np


def minimize_projected(
    w0,
    evaluate,
    gradient,
    *,
    max_iters,
    grad_tol=1e-8,
    c=1e-4,
    beta=0.5,
    block_sampler=None,
    stall_window=20,
    stall_tol=1e-12,
    max_backtracks=60,
    iter_offset=0,
):
    """Minimize over the nonnegative orthant by projected descent.

    Parameters
    ----------
    w0 : ndarray
        Starting point, nonnegative, with finite objective.
    evaluate : callable w -> (F, cache)
        Objective value (may be +inf) plus a cache handed to gradient.
    gradient : callable (w, cache, block) -> ndarray
        Full-length gradient; when block is not None only those entries
        are meaningful and the rest must be zero.
    block_sampler : callable rng_independent () -> ndarray or None
        Draws the coordinate block for one iteration; None means full.
    iter_offset : int
        Starting iteration number for the trace (used when stages of a
        penalty schedule share one trace).

    Returns
    -------
    dict with keys w, objective, trace (list of (iter, F, wall)),
    iterations, stop_reason, r_entry_count is left to the caller's
    gradient instrumentation.
    """
    start = time.perf_counter()
    w = np.array(w0, dtype=np.float64)
    f_val, cache = evaluate(w)
    if not np.isfinite(f_val):
        raise ValueError("starting point has non-finite objective")
    trace = [(iter_offset, f_val, time.perf_counter() - start)]
    history = [f_val]
    eta = 1.0
    stop_reason = "max-iters"
    iterations = 0

    for it in range(1, max_iters + 1):
        block = block_sampler() if block_sampler is not None else None
        g = gradient(w, cache, block)

        # projected gradient: at an active bound only descent directions count
        pg = g.copy()
        pg[(w <= 0.0) & (g > 0.0)] = 0.0
        if np.abs(pg).max(initial=0.0) <= grad_tol * (1.0 + abs(f_val)):
            stop_reason = "converged"
            break

        eta = 2.0 * eta
        accepted = False
        for _ in range(max_backtracks):
            w_new = np.maximum(w - eta * g, 0.0)
            step = w_new - w
            if not step.any():
                break
            f_new, cache_new = evaluate(w_new)
            if f_new <= f_val + c * float(g @ step):
                accepted = True
                break
            eta *= beta
        if not accepted:
            stop_reason = "stalled"
            break

        w = w_new
        f_val = f_new
        cache = cache_new
        iterations = it
        trace.append((iter_offset + it, f_val, time.perf_counter() - start))
        history.append(f_val)
        if len(history) > stall_window:
            f_old = history[-stall_window - 1]
            if f_old - f_val < stall_tol * max(1.0, abs(f_old)):
                stop_reason = "stalled"
                break

    return {
        "w": w,
        "objective": f_val,
        "trace": trace,
        "iterations": iterations,
        "stop_reason": stop_reason,
        "eta": eta,
    }
