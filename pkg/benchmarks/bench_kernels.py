"""Timing comparison of the compiled kernels against the numpy fallback.

Run from the repository root:

    python benchmarks/bench_kernels.py [--n 324] [--pairs 5000] [--repeats 5]

The shapes default to the largest measurement-driven workload the solvers
see in the test suite: a dense Laplacian pseudoinverse for n nodes, a full
weight vector over all n(n-1)/2 pairs, and a 5000-pair constraint block.
"""

import argparse
import time

import numpy as np

from reslearn._kernels import _fallback

try:
    from reslearn._kernels import _core
except ImportError:
    _core = None


def bench(fn, *args, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=324)
    ap.add_argument("--pairs", type=int, default=5000)
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    n = args.n
    s = args.pairs
    sym = rng.standard_normal((n, n))
    lp = (sym + sym.T) / 2.0
    us, vs = np.triu_indices(n, 1)
    m = us.shape[0]
    a = np.ascontiguousarray(us, dtype=np.intp)
    b = np.ascontiguousarray(vs, dtype=np.intp)
    pick = rng.choice(m, size=min(s, m), replace=False)
    u = a[pick]
    v = b[pick]
    delta = rng.standard_normal(u.shape[0])

    jobs = [
        ("pair_resistances", (lp, u, v)),
        ("resistance_block", (lp, a[:2000], b[:2000], u, v)),
        ("grad_accumulate", (lp, a, b, u, v, delta)),
    ]
    print(f"n={n}  all-pairs m={m}  sampled pairs={u.shape[0]}  repeats={args.repeats}")
    print(f"{'kernel':20s} {'fallback':>12s} {'compiled':>12s} {'speedup':>9s}")
    for name, call in jobs:
        t_fb = bench(getattr(_fallback, name), *call, repeats=args.repeats)
        if _core is None:
            print(f"{name:20s} {t_fb * 1e3:10.2f}ms {'absent':>12s}")
            continue
        t_c = bench(getattr(_core, name), *call, repeats=args.repeats)
        print(
            f"{name:20s} {t_fb * 1e3:10.2f}ms {t_c * 1e3:10.2f}ms "
            f"{t_fb / t_c:8.2f}x"
        )
    if _core is None:
        print("compiled extension not built; install with the Cython toolchain")


if __name__ == "__main__":
    main()
