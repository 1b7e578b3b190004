"""Weighted-graph core: pair indexing, Laplacians, pseudoinverse, and the
random-walk similarity computations (effective resistance, hitting times,
personalized PageRank).

A graph on n nodes is stored as a dense nonnegative weight vector over
all C(n, 2) unordered pairs in lexicographic order; zero weight means no
edge. Dense storage is deliberate, the target scale is a few hundred
nodes where O(n^3) eigendecompositions are cheap.
"""

from functools import lru_cache

import numpy as np

from .exceptions import (
    DisconnectedGraphError,
    FileFormatError,
    InvalidPairError,
    InvalidParameterError,
    NotPSDError,
)
from . import _kernels

# relative eigenvalue cutoff shared by the pseudoinverse and the
# connectivity test, so the two never disagree about the null space
EIG_CUTOFF = 1e-10


def num_pairs(n):
    """Number of unordered node pairs, C(n, 2)."""
    return n * (n - 1) // 2


def pair_index(u, v, n):
    """Linear index of the unordered pair (u, v) among all C(n, 2) pairs.

    Pairs are ordered lexicographically with u < v: (0,1), (0,2), ...,
    (n-2, n-1). The arguments may come in either order.

    Raises
    ------
    InvalidPairError
        If u == v or either node is outside [0, n).
    """
    u = int(u)
    v = int(v)
    if u == v or not (0 <= u < n) or not (0 <= v < n):
        raise InvalidPairError(f"invalid pair ({u}, {v}) for n={n}")
    if u > v:
        u, v = v, u
    return u * n - u * (u + 1) // 2 + (v - u - 1)


@lru_cache(maxsize=64)
def _row_offsets(n):
    u = np.arange(n - 1)
    return u * n - u * (u + 1) // 2


def pair_of(index, n):
    """Inverse of pair_index: the (u, v) with u < v at a linear index."""
    index = int(index)
    if not (0 <= index < num_pairs(n)):
        raise InvalidPairError(f"pair index {index} out of range for n={n}")
    offsets = _row_offsets(n)
    u = int(np.searchsorted(offsets, index, side="right")) - 1
    v = index - offsets[u] + u + 1
    return u, int(v)


@lru_cache(maxsize=64)
def all_pairs(n):
    """Arrays (us, vs) of all unordered pairs in lexicographic order."""
    us, vs = np.triu_indices(n, k=1)
    us.setflags(write=False)
    vs.setflags(write=False)
    return us, vs


class Graph:
    """Undirected weighted graph: node count plus a pair-weight vector.

    Parameters
    ----------
    n : int
        Node count, at least 2.
    weights : array_like, shape (C(n,2),)
        Nonnegative finite weight per unordered pair, lexicographic
        pair order. Zero entries are non-edges.

    Instances are immutable; the weight array is copied and frozen.
    """

    __slots__ = ("n", "weights")

    def __init__(self, n, weights):
        n = int(n)
        if n < 2:
            raise InvalidParameterError(f"need at least 2 nodes, got {n}")
        w = np.array(weights, dtype=np.float64)
        if w.shape != (num_pairs(n),):
            raise InvalidParameterError(
                f"weight vector has shape {w.shape}, expected ({num_pairs(n)},)"
            )
        if not np.all(np.isfinite(w)):
            raise InvalidParameterError("weights must be finite")
        if np.any(w < 0):
            raise InvalidParameterError("weights must be nonnegative")
        w.setflags(write=False)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "weights", w)

    def __setattr__(self, name, value):
        raise AttributeError("Graph is immutable")

    @classmethod
    def from_edges(cls, n, edges):
        """Build from (u, v, weight) triples; missing pairs get weight 0."""
        w = np.zeros(num_pairs(n))
        for u, v, wt in edges:
            idx = pair_index(u, v, n)
            if w[idx] != 0.0:
                raise InvalidPairError(f"duplicate edge ({u}, {v})")
            w[idx] = wt
        return cls(n, w)

    @property
    def num_edges(self):
        return int(np.count_nonzero(self.weights))

    def edge_list(self):
        """List of (u, v, weight) triples for nonzero weights, u < v."""
        us, vs = all_pairs(self.n)
        idx = np.flatnonzero(self.weights)
        return [(int(us[i]), int(vs[i]), float(self.weights[i])) for i in idx]

    def total_weight(self):
        return float(self.weights.sum())

    def __repr__(self):
        return f"Graph(n={self.n}, edges={self.num_edges})"


def laplacian_from_weights(n, weights):
    """Dense Laplacian from a raw pair-weight vector (no Graph needed)."""
    us, vs = all_pairs(n)
    lap = np.zeros((n, n))
    lap[us, vs] = -weights
    lap[vs, us] = -weights
    np.fill_diagonal(lap, -lap.sum(axis=1))
    return lap


def laplacian(g):
    """Graph Laplacian L = D - A as a dense symmetric array.

    Row sums are exactly zero by construction: the diagonal is set to
    the negated off-diagonal row sum.
    """
    return laplacian_from_weights(g.n, g.weights)


def degrees(g):
    """Weighted degree vector (diagonal of the Laplacian)."""
    return np.diagonal(laplacian(g)).copy()


def volume(g):
    """Twice the total edge weight; equals the Laplacian trace."""
    return 2.0 * float(g.weights.sum())


def pinv_psd(mat, cutoff=EIG_CUTOFF):
    """Moore-Penrose pseudoinverse of a symmetric PSD matrix.

    Uses a symmetric eigendecomposition; eigenvalues at or below
    cutoff * lambda_max are treated as exact zeros.

    Raises
    ------
    NotPSDError
        If an eigenvalue is below -cutoff * lambda_max.
    InvalidParameterError
        If the input is not (nearly) symmetric.
    """
    mat = np.asarray(mat, dtype=np.float64)
    scale = np.abs(mat).max() if mat.size else 0.0
    if not np.allclose(mat, mat.T, atol=1e-8 * max(scale, 1e-300), rtol=0):
        raise InvalidParameterError("matrix is not symmetric")
    vals, vecs = np.linalg.eigh((mat + mat.T) / 2.0)
    lam_max = max(float(vals[-1]), 0.0)
    if float(vals[0]) < -cutoff * lam_max:
        raise NotPSDError(
            f"eigenvalue {vals[0]:.3e} below -{cutoff:g} * lambda_max ({lam_max:.3e})"
        )
    inv = np.zeros_like(vals)
    keep = vals > cutoff * lam_max
    inv[keep] = 1.0 / vals[keep]
    return (vecs * inv) @ vecs.T


def pinv_sym(mat, cutoff=EIG_CUTOFF):
    """Pseudoinverse of a symmetric (possibly indefinite) matrix.

    Eigenvalues with magnitude at or below cutoff * max|eigenvalue| are
    treated as zero. Used by the regularized initialization, where the
    shifted matrix is indefinite by design.
    """
    vals, vecs = np.linalg.eigh((mat + np.asarray(mat).T) / 2.0)
    mag = np.abs(vals)
    top = mag.max() if mag.size else 0.0
    inv = np.zeros_like(vals)
    keep = mag > cutoff * top
    inv[keep] = 1.0 / vals[keep]
    return (vecs * inv) @ vecs.T


def _lap_eig(n, weights):
    lap = laplacian_from_weights(n, weights)
    vals, vecs = np.linalg.eigh(lap)
    return vals, vecs


def connected_from_weights(n, weights):
    """Connectivity test: exactly one near-zero Laplacian eigenvalue."""
    vals, _ = _lap_eig(n, weights)
    lam_max = max(float(vals[-1]), 0.0)
    return int(np.count_nonzero(vals <= EIG_CUTOFF * lam_max)) == 1


def is_connected(g):
    return connected_from_weights(g.n, g.weights)


def lap_pinv_from_weights(n, weights):
    """Laplacian pseudoinverse, or None when the graph is disconnected.

    One eigendecomposition serves both the connectivity test and the
    inversion, which keeps the two consistent under the shared cutoff.
    """
    vals, vecs = _lap_eig(n, weights)
    lam_max = max(float(vals[-1]), 0.0)
    near_zero = vals <= EIG_CUTOFF * lam_max
    if int(np.count_nonzero(near_zero)) != 1:
        return None
    inv = np.zeros_like(vals)
    inv[~near_zero] = 1.0 / vals[~near_zero]
    return (vecs * inv) @ vecs.T


def lap_pinv(g):
    """Laplacian pseudoinverse of a connected graph.

    Raises
    ------
    DisconnectedGraphError
        If the graph is disconnected.
    """
    lp = lap_pinv_from_weights(g.n, g.weights)
    if lp is None:
        raise DisconnectedGraphError("graph is disconnected")
    return lp


def effective_resistance(g, u, v):
    """Effective resistance between two nodes of a connected graph.

    Equals chi' L+ chi for the signed indicator chi of the pair. For a
    single edge of weight w this is 1/w; resistances always form a
    metric on the nodes.
    """
    pair_index(u, v, g.n)  # validates the pair
    lp = lap_pinv(g)
    return float(lp[u, u] + lp[v, v] - 2.0 * lp[u, v])


def resistance_table(g):
    """Symmetric n x n table of all pairwise effective resistances."""
    lp = lap_pinv(g)
    d = np.diagonal(lp)
    return d[:, None] + d[None, :] - 2.0 * lp


def pair_resistances_from_lp(lp, us, vs):
    """Resistances of selected pairs given a precomputed L+."""
    return _kernels.pair_resistances(lp, us, vs)


def resistance_columns(g, pairs):
    """Columns of the resistance operator R = B L+ B'.

    Parameters
    ----------
    g : Graph
        Connected graph.
    pairs : sequence of int
        Pair indices selecting columns.

    Returns
    -------
    ndarray, shape (C(n,2), len(pairs))
        Entry (i, j) is chi_i' L+ chi_j for pair indices i (all pairs,
        lexicographic) and pairs[j]. The diagonal of the full operator
        holds the effective resistances.
    """
    lp = lap_pinv(g)
    a, b = all_pairs(g.n)
    cols = np.asarray(pairs, dtype=np.intp)
    return _kernels.resistance_block(lp, a, b, a[cols], b[cols])


def ppr_matrix(g, alpha):
    """Personalized PageRank matrix of the lazy walk.

    Column u is the PPR vector of node u: alpha * (I - (1-alpha) W)^{-1}
    e_u with W = (I + A D^{-1}) / 2. Every column sums to one. alpha = 1
    gives the identity.

    Raises
    ------
    InvalidParameterError
        If alpha is outside (0, 1].
    DisconnectedGraphError
        If the graph is disconnected.
    """
    if not (0.0 < alpha <= 1.0):
        raise InvalidParameterError(f"alpha must be in (0, 1], got {alpha}")
    if not is_connected(g):
        raise DisconnectedGraphError("graph is disconnected")
    lap = laplacian(g)
    d = np.diagonal(lap)
    adj = np.diag(d) - lap
    walk = 0.5 * (np.eye(g.n) + adj / d[None, :])
    return alpha * np.linalg.inv(np.eye(g.n) - (1.0 - alpha) * walk)


def hitting_times(g):
    """Expected hitting times of the simple (non-lazy) random walk.

    Entry (u, v) is the expected number of steps to first reach v from
    u, under transition probabilities w_uv / deg(u). Closed form via
    L+: h(u, v) = vol * (L+[v,v] - L+[u,v]) + s[u] - s[v] with s = L+ d.
    Together with the commute identity h(u,v) + h(v,u) = vol * r(u,v).
    """
    lp = lap_pinv(g)
    lap = laplacian(g)
    d = np.diagonal(lap)
    vol = float(d.sum())
    s = lp @ d
    h = vol * (np.diagonal(lp)[None, :] - lp) + s[:, None] - s[None, :]
    np.fill_diagonal(h, 0.0)
    return h


def write_graph(g, path):
    """Write the edge-list text format: 'n <count>' then 'u v w' lines."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"n {g.n}\n")
        for u, v, w in g.edge_list():
            fh.write(f"{u} {v} {w:.17g}\n")


def read_graph(path):
    """Read the edge-list text format written by write_graph.

    Blank lines and '#' comments are ignored. Node pairs must satisfy
    u < v and appear at most once; weights must be nonnegative finite.

    Raises
    ------
    FileFormatError
        On any malformed line, with the 1-based line number.
    """
    n = None
    entries = []
    seen = set()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if n is None:
                if len(parts) != 2 or parts[0] != "n":
                    raise FileFormatError(
                        "expected header 'n <count>'", path=path, line=lineno
                    )
                try:
                    n = int(parts[1])
                except ValueError:
                    raise FileFormatError(
                        f"bad node count {parts[1]!r}", path=path, line=lineno
                    ) from None
                if n < 2:
                    raise FileFormatError(
                        f"node count must be >= 2, got {n}", path=path, line=lineno
                    )
                continue
            if len(parts) != 3:
                raise FileFormatError(
                    f"expected 'u v w', got {line!r}", path=path, line=lineno
                )
            try:
                u, v = int(parts[0]), int(parts[1])
                w = float(parts[2])
            except ValueError:
                raise FileFormatError(
                    f"could not parse edge line {line!r}", path=path, line=lineno
                ) from None
            if not (0 <= u < v < n):
                raise FileFormatError(
                    f"edge ({u}, {v}) violates 0 <= u < v < {n}",
                    path=path,
                    line=lineno,
                )
            if (u, v) in seen:
                raise FileFormatError(
                    f"duplicate edge ({u}, {v})", path=path, line=lineno
                )
            if not np.isfinite(w) or w < 0:
                raise FileFormatError(
                    f"weight must be nonnegative finite, got {parts[2]}",
                    path=path,
                    line=lineno,
                )
            seen.add((u, v))
            entries.append((u, v, w))
    if n is None:
        raise FileFormatError("empty graph file (no header)", path=path)
    return Graph.from_edges(n, entries)
