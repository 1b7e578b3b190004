"""Exact reconstruction routes.

When similarity data is complete and noise-free the graph is pinned
down in closed form: a full resistance table inverts through one
centered pseudoinverse, hitting times reduce to resistances via the
commute identity, a tree is recovered from shortest-path completion of
its edge resistances, and a full personalized PageRank matrix inverts
back to the walk matrix.
"""

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components, dijkstra

from . import _kernels
from .exceptions import (
    IncompletableError,
    InconsistentPPRError,
    InfeasibleMeasurementsError,
    InvalidParameterError,
    NoInformationError,
    NotATreeInstanceError,
    NotPSDError,
)
from .graph import (
    Graph,
    all_pairs,
    connected_from_weights,
    lap_pinv,
    pinv_psd,
)

# relative tolerance for clamping slightly negative recovered weights
LAPLACIAN_TOL = 1e-8

# minimum shortest-path edge length during completion
MIN_EDGE_LENGTH = 1e-6


def _check_table(table, n, name):
    table = np.asarray(table, dtype=np.float64)
    if table.ndim != 2 or table.shape[0] != table.shape[1]:
        raise InvalidParameterError(f"{name} must be square, got {table.shape}")
    if n is not None and table.shape[0] != n:
        raise InvalidParameterError(
            f"{name} has order {table.shape[0]}, expected {n}"
        )
    return table


def reconstruct_full(table, n=None):
    """Unique graph whose effective resistances equal the given table.

    Implements the closed form L = -2 [(I - J/n) R (I - J/n)]^+ . The
    table must be symmetric with zero diagonal and positive
    off-diagonal entries; tables not realizable by any connected graph
    raise InfeasibleMeasurementsError.
    """
    table = _check_table(table, n, "resistance table")
    n = table.shape[0]
    if n < 2:
        raise InvalidParameterError("need at least 2 nodes")
    scale = float(np.abs(table).max())
    if scale == 0.0:
        raise InvalidParameterError("resistance table is all zeros")
    if np.abs(np.diagonal(table)).max() > 1e-12 * scale:
        raise InvalidParameterError("resistance table diagonal must be zero")
    if np.abs(table - table.T).max() > 1e-8 * scale:
        raise InvalidParameterError("resistance table must be symmetric")
    us, vs = all_pairs(n)
    if np.any(table[us, vs] <= 0):
        raise InvalidParameterError(
            "off-diagonal resistances must be positive"
        )
    center = np.eye(n) - np.full((n, n), 1.0 / n)
    gram = -(center @ table @ center)
    try:
        lap = 2.0 * pinv_psd(gram)
    except NotPSDError as exc:
        raise InfeasibleMeasurementsError(
            f"table is not realizable by any graph: {exc}"
        ) from exc
    off = lap[us, vs]
    lap_scale = float(np.abs(lap).max())
    bad = off > LAPLACIAN_TOL * lap_scale
    if np.any(bad):
        i = int(np.argmax(off))
        raise InfeasibleMeasurementsError(
            "recovered matrix is not a Laplacian: positive off-diagonal "
            f"{off[i]:.3e} at pair ({us[i]}, {vs[i]})"
        )
    weights = np.maximum(-off, 0.0)
    if not connected_from_weights(n, weights):
        # a deficient-rank gram yields a disconnected output whose
        # pseudoinverse reproduces the table, but true resistances
        # across components are infinite, so the table is infeasible
        raise InfeasibleMeasurementsError(
            "table is not realizable by any connected graph"
        )
    return Graph(n, weights)


def reconstruct_from_hitting(h_table, n=None):
    """Graph (up to scale) from the full ordered-pair hitting-time table.

    h(u,v) + h(v,u) is the commute time, proportional to the effective
    resistance, so the resistance route applies after symmetrization.
    The output is normalized to total edge weight 1.
    """
    h_table = _check_table(h_table, n, "hitting-time table")
    n = h_table.shape[0]
    h_scale = float(np.abs(h_table).max())
    if h_scale == 0.0:
        raise InvalidParameterError("hitting-time table is all zeros")
    if np.abs(np.diagonal(h_table)).max() > 1e-12 * h_scale:
        raise InvalidParameterError("hitting-time diagonal must be zero")
    commute = h_table + h_table.T
    us, vs = all_pairs(n)
    if np.any(commute[us, vs] <= 0):
        raise InvalidParameterError(
            "h(u,v) + h(v,u) must be positive for u != v"
        )
    g = reconstruct_full(commute)
    total = g.weights.sum()
    if total <= 0:
        raise InfeasibleMeasurementsError("recovered graph has no edges")
    return Graph(n, g.weights / total)


def metric_completion(ms):
    """All-pairs shortest-path completion of a measurement set.

    Treats each measured pair as an edge of length max(rbar, 1e-6) and
    returns the full distance table. Raises IncompletableError naming
    one of the components when the measured pairs do not connect all
    nodes.
    """
    n = ms.n
    lengths = np.maximum(ms.values, MIN_EDGE_LENGTH)
    adj = coo_matrix((lengths, (ms.us, ms.vs)), shape=(n, n)).tocsr()
    ncomp, labels = connected_components(adj, directed=False)
    if ncomp != 1:
        sizes = np.bincount(labels, minlength=ncomp)
        smallest = int(np.argmin(sizes))
        nodes = np.flatnonzero(labels == smallest).tolist()
        raise IncompletableError(
            f"measurement pairs leave the graph disconnected; "
            f"isolated component: {nodes}"
        )
    dist = dijkstra(adj, directed=False)
    np.fill_diagonal(dist, 0.0)
    return (dist + dist.T) / 2.0


def reconstruct_tree(ms, rel_tol=1e-6):
    """Exact tree recovery from resistances on a superset of its edges.

    Completes the table along shortest paths (exact for trees, where
    resistances add along the unique path) and inverts the closed form.
    The output must reproduce every input measurement to rel_tol, else
    NotATreeInstanceError is raised.
    """
    table = metric_completion(ms)
    g = reconstruct_full(table)
    lp = lap_pinv(g)
    r = _kernels.pair_resistances(lp, ms.us, ms.vs)
    scale = max(1.0, float(np.abs(ms.values).max()))
    worst = float(np.abs(r - ms.values).max()) if len(ms) else 0.0
    if worst > rel_tol * scale:
        raise NotATreeInstanceError(
            f"recovered graph misses the measurements by {worst:.3e}; "
            "the instance is not an exactly measured tree"
        )
    return g


def reconstruct_from_ppr(p_matrix, alpha):
    """Graph (up to scale) from a full personalized PageRank matrix.

    Inverts p = alpha (I - (1-alpha) W)^{-1} for the lazy walk matrix
    W, reads off N = 2W - I = A D^{-1}, propagates degree ratios
    d_v / d_u = N_vu / N_uv over a breadth-first traversal of N's
    support, and symmetrizes A = N D. Output is normalized to total
    edge weight 1, which makes the anchor choice unobservable.

    Raises
    ------
    NoInformationError
        If alpha = 1 (the walk never moves, P = I carries nothing).
    InvalidParameterError
        If alpha is outside (0, 1).
    InconsistentPPRError
        If the matrix does not invert to any undirected graph.
    """
    if alpha == 1.0:
        raise NoInformationError("alpha = 1 gives P = I for every graph")
    if not (0.0 < alpha < 1.0):
        raise InvalidParameterError(f"alpha must be in (0, 1), got {alpha}")
    p_matrix = _check_table(p_matrix, None, "PPR matrix")
    n = p_matrix.shape[0]
    if n < 2:
        raise InvalidParameterError("need at least 2 nodes")
    try:
        p_inv = np.linalg.inv(p_matrix)
    except np.linalg.LinAlgError as exc:
        raise InconsistentPPRError(f"matrix is singular: {exc}") from exc
    walk = (np.eye(n) - alpha * p_inv) / (1.0 - alpha)
    n_mat = 2.0 * walk - np.eye(n)

    support = np.abs(n_mat) > 1e-10
    np.fill_diagonal(support, False)
    deg = np.zeros(n)
    deg[0] = 1.0
    seen = np.zeros(n, dtype=bool)
    seen[0] = True
    queue = [0]
    while queue:
        u = queue.pop(0)
        for v in np.flatnonzero(support[u] | support[:, u]):
            if seen[v]:
                continue
            if abs(n_mat[u, v]) <= 1e-10 or abs(n_mat[v, u]) <= 1e-10:
                raise InconsistentPPRError(
                    f"one-sided walk support between nodes {u} and {v}"
                )
            deg[v] = deg[u] * n_mat[v, u] / n_mat[u, v]
            seen[v] = True
            queue.append(v)
    if not seen.all():
        raise InconsistentPPRError("walk support does not connect all nodes")
    if np.any(deg <= 0):
        raise InconsistentPPRError("recovered degrees are not all positive")

    adj = n_mat * deg[None, :]
    scale = float(np.abs(adj).max())
    if scale == 0.0:
        raise InconsistentPPRError("recovered adjacency is zero")
    if np.abs(adj - adj.T).max() > 1e-6 * scale:
        raise InconsistentPPRError(
            "recovered adjacency is asymmetric beyond tolerance"
        )
    adj = (adj + adj.T) / 2.0
    if np.abs(np.diagonal(adj)).max() > 1e-6 * scale:
        raise InconsistentPPRError("recovered adjacency has self loops")
    if adj.min() < -1e-6 * scale:
        raise InconsistentPPRError("recovered adjacency has negative entries")
    us, vs = all_pairs(n)
    weights = np.maximum(adj[us, vs], 0.0)
    total = weights.sum()
    if total <= 0:
        raise InconsistentPPRError("recovered graph has no edges")
    return Graph(n, weights / total)
