"""Evaluation of learned graphs against measurements and ground truth."""

import numpy as np

from . import _kernels
from .exceptions import InvalidParameterError, UndefinedMetricError
from .graph import all_pairs, lap_pinv, num_pairs


def normalized_objective(h, ms):
    """Sum of squared residuals over S divided by the sum of squared
    targets: sum_S (r_h - rbar)^2 / sum_S rbar^2."""
    denom = float(ms.values @ ms.values)
    if denom == 0.0:
        raise UndefinedMetricError("all measurement values are zero")
    lp = lap_pinv(h)
    r = _kernels.pair_resistances(lp, ms.us, ms.vs)
    diff = r - ms.values
    return float(diff @ diff) / denom


def generalization_error(h, g_true):
    """Residual energy against the true resistances over all pairs:
    sum (r_h - r_true)^2 / sum r_true^2."""
    if h.n != g_true.n:
        raise InvalidParameterError(
            f"graphs disagree on n: {h.n} vs {g_true.n}"
        )
    us, vs = all_pairs(h.n)
    lp_h = lap_pinv(h)
    lp_t = lap_pinv(g_true)
    r_h = _kernels.pair_resistances(lp_h, us, vs)
    r_t = _kernels.pair_resistances(lp_t, us, vs)
    denom = float(r_t @ r_t)
    if denom == 0.0:
        raise UndefinedMetricError("true resistances are all zero")
    diff = r_h - r_t
    return float(diff @ diff) / denom


def top_m_pairs(h, m):
    """Indices of the m heaviest nonzero pairs of h.

    Ties broken by ascending pair index; zero weights never qualify,
    so fewer than m indices come back when h has fewer nonzero weights.
    """
    w = h.weights
    order = np.lexsort((np.arange(w.shape[0]), -w))
    top = order[:m]
    return top[w[top] > 0.0]


def edges_learned(h, g_true):
    """Percentage of the true edges among the m heaviest edges of h,
    where m is the true edge count."""
    m = g_true.num_edges
    if m == 0:
        raise UndefinedMetricError("true graph has no edges")
    if h.n != g_true.n:
        raise InvalidParameterError(
            f"graphs disagree on n: {h.n} vs {g_true.n}"
        )
    top = top_m_pairs(h, m)
    hits = int(np.count_nonzero(g_true.weights[top] > 0.0))
    return 100.0 * hits / m


def baseline_density(g_true):
    """Edge density as a percentage: the edges-learned score a uniformly
    random top-m guess achieves in expectation."""
    return 100.0 * g_true.num_edges / num_pairs(g_true.n)


def build_metrics(
    h=None,
    ms=None,
    truth=None,
    objective=None,
    runtime_seconds=None,
    config=None,
):
    """Assemble the metrics JSON object.

    Fields without the inputs they need are null: the measurement
    metrics need ms, the truth metrics need the true graph.
    """
    out = {
        "objective": objective,
        "normalized_objective": None,
        "generalization_error": None,
        "edges_learned": None,
        "baseline": None,
        "runtime_seconds": runtime_seconds,
        "config": config or {},
    }
    if h is not None and ms is not None:
        lp = lap_pinv(h)
        r = _kernels.pair_resistances(lp, ms.us, ms.vs)
        diff = r - ms.values
        out["objective"] = float(diff @ diff)
        denom = float(ms.values @ ms.values)
        if denom > 0.0:
            out["normalized_objective"] = float(diff @ diff) / denom
    if h is not None and truth is not None:
        out["generalization_error"] = generalization_error(h, truth)
        out["edges_learned"] = edges_learned(h, truth)
        out["baseline"] = baseline_density(truth)
    return out
