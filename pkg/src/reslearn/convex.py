"""Convex trace-minimization solver.

Minimizes total edge weight subject to per-pair resistance upper
bounds, as an increasing-penalty sequence of smooth problems

    min_{w >= 0}  2 sum(w) + rho * sum_S max(0, r_w - rbar)^2.

Each stage is solved by the shared projected-descent engine, warm
started from the previous stage; rho grows geometrically until the
worst constraint violation (relative to the mean measurement) drops
below tolerance or the rho budget is exhausted. The penalized
objective is convex in w because effective resistances are convex in
the edge weights.
"""

import time
from dataclasses import dataclass

import numpy as np

from . import _kernels
from ._descent import minimize_projected
from .exceptions import InvalidParameterError
from .graph import Graph, all_pairs, lap_pinv, lap_pinv_from_weights, num_pairs
from .lsq import LearnResult


@dataclass
class PenaltyConfig:
    """Penalty schedule plus inner-solver knobs."""

    rho_init: float = 1.0
    rho_growth: float = 10.0
    rho_max: float = 1e8
    violation_tol: float = 1e-3
    inner_max_iters: int = 400
    grad_tol: float = 1e-8
    c: float = 1e-4
    beta: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.rho_init <= 0 or self.rho_max <= 0:
            raise InvalidParameterError("rho_init and rho_max must be positive")
        if self.rho_growth <= 1.0:
            raise InvalidParameterError("rho_growth must exceed 1")
        if self.violation_tol <= 0:
            raise InvalidParameterError("violation_tol must be positive")
        if self.inner_max_iters < 1:
            raise InvalidParameterError("inner_max_iters must be >= 1")


@dataclass
class FeasibilityReport:
    """Per-pair slack of a graph against the measured upper bounds."""

    us: np.ndarray
    vs: np.ndarray
    rbar: np.ndarray
    r: np.ndarray
    slack: np.ndarray
    feasible_at_tol: bool = True
    rho_final: float = 0.0

    @property
    def min_slack(self):
        return float(self.slack.min()) if self.slack.size else 0.0

    def max_relative_violation(self):
        """Worst violation max(0, r - rbar) over the mean measurement."""
        if self.slack.size == 0:
            return 0.0
        scale = float(np.mean(self.rbar))
        if scale <= 0:
            scale = 1.0
        return float(np.maximum(-self.slack, 0.0).max() / scale)

    def rows(self):
        return [
            (int(u), int(v), float(rb), float(rr), float(s))
            for u, v, rb, rr, s in zip(self.us, self.vs, self.rbar, self.r, self.slack)
        ]


def check_feasible(g, ms):
    """Slack rbar - r_g per measured pair; feasible when all slacks >= 0."""
    lp = lap_pinv(g)
    r = _kernels.pair_resistances(lp, ms.us, ms.vs)
    slack = ms.values - r
    return FeasibilityReport(
        us=ms.us.copy(),
        vs=ms.vs.copy(),
        rbar=ms.values.copy(),
        r=r,
        slack=slack,
    )


def write_feasibility_report(report, path):
    """CSV rows u,v,rbar,r,slack."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("u,v,rbar,r,slack\n")
        for u, v, rbar, r, slack in report.rows():
            fh.write(f"{u},{v},{rbar:.17g},{r:.17g},{slack:.17g}\n")


def feasible_start(ms):
    """Uniform complete graph with every constraint strictly feasible.

    A complete graph with weight c on every pair has resistance 2/(nc)
    between every two nodes, so c = 4 / (n * min rbar) puts every
    resistance at half the tightest bound.
    """
    min_rbar = float(ms.values.min())
    if min_rbar <= 0:
        raise InvalidParameterError(
            "convex solver needs positive measurement values"
        )
    c = 4.0 / (ms.n * min_rbar)
    return np.full(num_pairs(ms.n), c)


def penalized_objective(w, ms, rho):
    """2 sum(w) + rho * sum max(0, r - rbar)^2, +inf when disconnected."""
    lp = lap_pinv_from_weights(ms.n, np.asarray(w, dtype=np.float64))
    if lp is None:
        return np.inf
    r = _kernels.pair_resistances(lp, ms.us, ms.vs)
    viol = np.maximum(r - ms.values, 0.0)
    return 2.0 * float(np.sum(w)) + rho * float(viol @ viol)


def solve_convex(ms, config=None):
    """Run the penalty schedule; returns (LearnResult, FeasibilityReport).

    The result's objective and trace are in the penalized objective at
    the stage's rho. The report carries the final per-pair slacks, the
    last rho used, and whether the violation tolerance was met; when it
    was not, the result is the best iterate flagged feasible_at_tol =
    False rather than an exception.
    """
    if config is None:
        config = PenaltyConfig()
    if len(ms) == 0:
        raise InvalidParameterError("convex solver needs at least one pair")
    start = time.perf_counter()
    n = ms.n
    a, b = all_pairs(n)
    w = feasible_start(ms)
    mean_rbar = float(np.mean(ms.values))

    def make_callbacks(rho):
        def evaluate(w_):
            lp = lap_pinv_from_weights(n, w_)
            if lp is None:
                return np.inf, None
            r = _kernels.pair_resistances(lp, ms.us, ms.vs)
            viol = np.maximum(r - ms.values, 0.0)
            val = 2.0 * float(np.sum(w_)) + rho * float(viol @ viol)
            return val, (lp, viol)

        def grad(w_, cache, block):
            lp, viol = cache
            counter["r_entries"] += a.shape[0] * len(ms)
            acc = _kernels.grad_accumulate(lp, a, b, ms.us, ms.vs, viol)
            return 2.0 - 2.0 * rho * acc

        return evaluate, grad

    counter = {"r_entries": 0}
    trace = []
    iterations = 0
    stop_reason = "max-iters"
    rho = config.rho_init
    rho_used = rho
    feasible = False
    while True:
        evaluate, grad = make_callbacks(rho)
        out = minimize_projected(
            w,
            evaluate,
            grad,
            max_iters=config.inner_max_iters,
            grad_tol=config.grad_tol,
            c=config.c,
            beta=config.beta,
            iter_offset=iterations,
        )
        w = out["w"]
        rho_used = rho
        # stage traces share one timeline; rebase stage wall times
        base = trace[-1][2] if trace else 0.0
        stage = [(it, obj, base + wall) for it, obj, wall in out["trace"]]
        trace.extend(stage if not trace else stage[1:])
        iterations += out["iterations"]
        stop_reason = out["stop_reason"]

        lp = lap_pinv_from_weights(n, w)
        r = _kernels.pair_resistances(lp, ms.us, ms.vs)
        viol = float(np.maximum(r - ms.values, 0.0).max())
        rel_viol = viol / mean_rbar if mean_rbar > 0 else viol
        if rel_viol <= config.violation_tol:
            feasible = True
            break
        if rho * config.rho_growth > config.rho_max:
            break
        rho *= config.rho_growth

    g = Graph(n, w)
    report = check_feasible(g, ms)
    report.feasible_at_tol = feasible
    report.rho_final = rho_used
    result = LearnResult(
        graph=g,
        objective=trace[-1][1],
        objective_trace=trace,
        iterations_used=iterations,
        wall_time=time.perf_counter() - start,
        stop_reason=stop_reason if feasible else "infeasible-at-tolerance",
        r_entries=counter["r_entries"],
        extra={"rho_final": rho_used, "feasible_at_tol": feasible},
    )
    return result, report
