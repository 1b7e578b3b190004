import os
import subprocess
import sys

import numpy as np
import pytest
from numpy.testing import assert_allclose

from reslearn._kernels import _fallback, HAVE_COMPILED

_core = pytest.importorskip("reslearn._kernels._core")


def random_inputs(rng, n, m, s):
    sym = rng.standard_normal((n, n))
    lp = (sym + sym.T) / 2.0
    a = rng.integers(0, n, size=m).astype(np.intp)
    b = (a + 1 + rng.integers(0, n - 1, size=m)).astype(np.intp) % n
    u = rng.integers(0, n, size=s).astype(np.intp)
    v = (u + 1 + rng.integers(0, n - 1, size=s)).astype(np.intp) % n
    delta = rng.standard_normal(s)
    return lp, a, b, u, v, delta


def brute_entry(lp, a, b, u, v):
    return lp[a, u] - lp[a, v] - lp[b, u] + lp[b, v]


# ---------------------------------------------------------- oracle checks


def test_pair_resistances_matches_definition():
    rng = np.random.default_rng(90)
    lp, a, b, _, _, _ = random_inputs(rng, 9, 14, 1)
    got = _fallback.pair_resistances(lp, a, b)
    want = np.array([lp[i, i] + lp[j, j] - 2 * lp[i, j] for i, j in zip(a, b)])
    assert_allclose(got, want, rtol=1e-14)


def test_resistance_block_matches_brute_force():
    rng = np.random.default_rng(91)
    lp, a, b, u, v, _ = random_inputs(rng, 8, 11, 13)
    got = _fallback.resistance_block(lp, a, b, u, v)
    want = np.empty((11, 13))
    for i in range(11):
        for j in range(13):
            want[i, j] = brute_entry(lp, a[i], b[i], u[j], v[j])
    assert_allclose(got, want, rtol=1e-14)


def test_grad_accumulate_matches_brute_force():
    rng = np.random.default_rng(92)
    lp, a, b, u, v, delta = random_inputs(rng, 7, 10, 12)
    got = _fallback.grad_accumulate(lp, a, b, u, v, delta)
    want = np.zeros(10)
    for i in range(10):
        for j in range(12):
            want[i] += brute_entry(lp, a[i], b[i], u[j], v[j]) ** 2 * delta[j]
    assert_allclose(got, want, rtol=1e-12)


# ------------------------------------------------- compiled == fallback


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_compiled_matches_fallback(seed):
    rng = np.random.default_rng(100 + seed)
    lp, a, b, u, v, delta = random_inputs(rng, 12, 30, 25)
    assert_allclose(
        _core.pair_resistances(lp, u, v),
        _fallback.pair_resistances(lp, u, v),
        rtol=1e-13,
    )
    assert_allclose(
        _core.resistance_block(lp, a, b, u, v),
        _fallback.resistance_block(lp, a, b, u, v),
        rtol=1e-13,
    )
    assert_allclose(
        _core.grad_accumulate(lp, a, b, u, v, delta),
        _fallback.grad_accumulate(lp, a, b, u, v, delta),
        rtol=1e-12,
    )


def test_compiled_accepts_readonly_arrays():
    rng = np.random.default_rng(104)
    lp, a, b, u, v, delta = random_inputs(rng, 6, 8, 9)
    for arr in (lp, a, b, u, v, delta):
        arr.setflags(write=False)
    r = _core.pair_resistances(lp, u, v)
    blk = _core.resistance_block(lp, a, b, u, v)
    acc = _core.grad_accumulate(lp, a, b, u, v, delta)
    assert r.shape == (9,) and blk.shape == (8, 9) and acc.shape == (8,)


def test_empty_index_arrays():
    rng = np.random.default_rng(105)
    lp = np.eye(4)
    empty = np.array([], dtype=np.intp)
    val = np.array([])
    assert _fallback.grad_accumulate(lp, empty, empty, empty, empty, val).shape == (0,)
    assert _core.grad_accumulate(lp, empty, empty, empty, empty, val).shape == (0,)


# ------------------------------------------------------------- chunking


def test_fallback_chunking_is_transparent(monkeypatch):
    rng = np.random.default_rng(106)
    lp, a, b, u, v, delta = random_inputs(rng, 10, 21, 17)
    full = _fallback.grad_accumulate(lp, a, b, u, v, delta)
    monkeypatch.setattr(_fallback, "_CHUNK_BUDGET", 7)
    chunked = _fallback.grad_accumulate(lp, a, b, u, v, delta)
    assert_allclose(chunked, full, rtol=1e-12)


# -------------------------------------------------------- env selection


def test_env_var_forces_fallback():
    env = dict(os.environ, RESLEARN_PURE="1")
    out = subprocess.run(
        [
            sys.executable,
            "-c",
            "from reslearn import _kernels; print(_kernels.HAVE_COMPILED)",
        ],
        capture_output=True,
        text=True,
        env=env,
        check=True,
    )
    assert out.stdout.strip() == "False"


def test_this_build_uses_compiled_kernels():
    if os.environ.get("RESLEARN_PURE") == "1":
        pytest.skip("fallback forced via RESLEARN_PURE")
    assert HAVE_COMPILED
