"""Kernel selection: compiled extension when built, numpy fallback otherwise.

Set RESLEARN_PURE=1 in the environment to force the fallback (useful for
benchmarks and for checking the two implementations against each other).
"""

import os

import numpy as np

from . import _fallback

HAVE_COMPILED = False
_impl = _fallback

if os.environ.get("RESLEARN_PURE") != "1":
    try:
        from . import _core as _impl  # type: ignore[no-redef]

        HAVE_COMPILED = True
    except ImportError:
        pass


def _idx(x):
    return np.ascontiguousarray(x, dtype=np.intp)


def _mat(x):
    return np.ascontiguousarray(x, dtype=np.float64)


def pair_resistances(lp, u, v):
    return _impl.pair_resistances(_mat(lp), _idx(u), _idx(v))


def resistance_block(lp, a, b, u, v):
    return _impl.resistance_block(_mat(lp), _idx(a), _idx(b), _idx(u), _idx(v))


def grad_accumulate(lp, a, b, u, v, delta):
    return _impl.grad_accumulate(
        _mat(lp), _idx(a), _idx(b), _idx(u), _idx(v),
        np.ascontiguousarray(delta, dtype=np.float64),
    )
