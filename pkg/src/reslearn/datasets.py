"""Graph sources: a lattice generator, a two-cluster k-NN generator,
and a reader for social-circle edge lists."""

import warnings

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .exceptions import FileFormatError, InvalidParameterError
from .graph import Graph, connected_from_weights, num_pairs, pair_index

KNN_MAX_ATTEMPTS = 200


def gen_grid(rows, cols):
    """4-neighbor lattice with unit weights; rows * cols nodes."""
    if rows < 2 or cols < 2:
        raise InvalidParameterError(
            f"grid needs both dimensions >= 2, got {rows} x {cols}"
        )
    n = rows * cols
    edges = []
    for r in range(rows):
        for c in range(cols):
            node = r * cols + c
            if c + 1 < cols:
                edges.append((node, node + 1, 1.0))
            if r + 1 < rows:
                edges.append((node, node + cols, 1.0))
    return Graph.from_edges(n, edges)


def _knn_once(n, k, seed):
    rng = np.random.default_rng(seed)
    half = n // 2
    pts = rng.normal(size=(n, 2))
    pts[:half, 0] -= 3.0
    pts[half:, 0] += 3.0
    diff = pts[:, None, :] - pts[None, :, :]
    dist = np.sqrt(np.sum(diff * diff, axis=2))
    np.fill_diagonal(dist, np.inf)
    w = np.zeros(num_pairs(n))
    for i in range(n):
        for j in np.argpartition(dist[i], k)[:k]:
            w[pair_index(i, int(j), n)] = 1.0
    return w


def gen_knn(n, k, seed=0):
    """Union-symmetrized k-nearest-neighbor graph of a two-cluster
    Gaussian point cloud.

    n/2 points per cluster, 2-D unit covariance, means (-3, 0) and
    (3, 0). Every node links to its k nearest points; an edge exists
    when either endpoint selects the other. Unit weights. Disconnected
    draws are regenerated with the seed incremented (with a warning),
    so the output is deterministic given the seed.
    """
    if n < 2 or n % 2 != 0:
        raise InvalidParameterError(f"n must be even and >= 2, got {n}")
    if not (1 <= k < n):
        raise InvalidParameterError(f"k must satisfy 1 <= k < n, got {k}")
    for attempt in range(KNN_MAX_ATTEMPTS):
        w = _knn_once(n, k, seed + attempt)
        if connected_from_weights(n, w):
            return Graph(n, w)
        warnings.warn(
            f"k-NN draw with seed {seed + attempt} is disconnected; "
            f"retrying with seed {seed + attempt + 1}",
            stacklevel=2,
        )
    raise InvalidParameterError(
        f"no connected k-NN graph found in {KNN_MAX_ATTEMPTS} attempts "
        f"from seed {seed}; raise k"
    )


def read_ego_edges(path):
    """Read a whitespace 'u v' edge list and keep its largest connected
    component.

    Node IDs are arbitrary tokens; they are remapped to 0..n-1 in
    sorted order (numeric when all tokens parse as integers), so the
    output does not depend on line order. Self loops are skipped with
    one summary warning. Returns (graph, original_ids) where
    original_ids[i] is the input ID of node i.
    """
    raw_edges = set()
    ids = set()
    self_loops = 0
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise FileFormatError(
                    f"expected 'u v', got {line!r}", path=path, line=lineno
                )
            u, v = parts
            if u == v:
                self_loops += 1
                continue
            ids.add(u)
            ids.add(v)
            raw_edges.add((u, v) if u < v else (v, u))
    if self_loops:
        warnings.warn(f"skipped {self_loops} self-loop lines", stacklevel=2)
    if not raw_edges:
        raise FileFormatError("no edges in file", path=path)

    try:
        order = sorted(ids, key=int)
    except ValueError:
        order = sorted(ids)
    index = {tok: i for i, tok in enumerate(order)}
    total = len(order)
    rows = np.array([index[u] for u, v in raw_edges])
    cols = np.array([index[v] for u, v in raw_edges])
    adj = coo_matrix(
        (np.ones(rows.shape[0]), (rows, cols)), shape=(total, total)
    )
    ncomp, labels = connected_components(adj, directed=False)
    sizes = np.bincount(labels, minlength=ncomp)
    keep_label = int(np.argmax(sizes))
    kept = [tok for tok in order if labels[index[tok]] == keep_label]
    remap = {tok: i for i, tok in enumerate(kept)}
    edges = [
        (remap[u], remap[v], 1.0)
        for u, v in raw_edges
        if u in remap and v in remap
    ]
    n = len(kept)
    if n < 2:
        raise FileFormatError(
            "largest component has fewer than 2 nodes", path=path
        )
    return Graph.from_edges(n, edges), kept
