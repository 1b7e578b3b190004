"""Pure-numpy kernels, used when the compiled extension is unavailable.

All three functions take the dense Laplacian pseudoinverse ``lp`` and
index arrays describing pairs. A pair (a, b) corresponds to the
incidence row chi_ab, so the resistance-operator entry for row pair
(a, b) and column pair (u, v) is

    R[(a,b),(u,v)] = lp[a,u] - lp[a,v] - lp[b,u] + lp[b,v].

The fallback works in chunks to bound peak memory; the compiled kernel
in _core.pyx streams the same arithmetic with two cached lp rows.
"""

import numpy as np

# rough element budget for temporary blocks (~160 MB of float64)
_CHUNK_BUDGET = 20_000_000


def pair_resistances(lp, u, v):
    """Effective resistances lp[u,u] + lp[v,v] - 2 lp[u,v], vectorized."""
    d = np.diagonal(lp)
    return d[u] + d[v] - 2.0 * lp[u, v]


def resistance_block(lp, a, b, u, v):
    """Dense block of the resistance operator: rows (a, b), columns (u, v)."""
    g = lp[:, u] - lp[:, v]
    return g[a, :] - g[b, :]


def grad_accumulate(lp, a, b, u, v, delta):
    """out[i] = sum_j R[(a_i,b_i),(u_j,v_j)]^2 * delta[j].

    Chunked over both rows and columns so no temporary exceeds the
    element budget.
    """
    m = a.shape[0]
    s = u.shape[0]
    out = np.zeros(m)
    if m == 0 or s == 0:
        return out
    col_chunk = max(1, min(s, _CHUNK_BUDGET // max(1, lp.shape[0])))
    for j0 in range(0, s, col_chunk):
        j1 = min(s, j0 + col_chunk)
        g = lp[:, u[j0:j1]] - lp[:, v[j0:j1]]
        d = delta[j0:j1]
        row_chunk = max(1, _CHUNK_BUDGET // (j1 - j0))
        for i0 in range(0, m, row_chunk):
            i1 = min(m, i0 + row_chunk)
            block = g[a[i0:i1], :] - g[b[i0:i1], :]
            np.square(block, out=block)
            out[i0:i1] += block @ d
    return out
