"""Constraint-set sampling, noise injection, and measurement file I/O.

A MeasurementSet is the solver input: node count plus (u, v, rbar)
entries for a subset S of unordered pairs, where rbar is a possibly
noisy effective-resistance target.
"""

import numpy as np

from .exceptions import (
    EmptySampleError,
    FileFormatError,
    InvalidPairError,
    InvalidParameterError,
)
from .graph import all_pairs, lap_pinv, num_pairs, pair_index
from . import _kernels


class MeasurementSet:
    """Pairs and target values, duplicate-free, u < v per entry.

    Parameters
    ----------
    n : int
        Node count.
    pairs : sequence of (u, v)
        Distinct unordered pairs; order is preserved.
    values : array_like
        One finite target per pair (may be negative under noise).
    """

    __slots__ = ("n", "us", "vs", "values")

    def __init__(self, n, pairs, values):
        n = int(n)
        if n < 2:
            raise InvalidParameterError(f"need at least 2 nodes, got {n}")
        us = []
        vs = []
        seen = set()
        for u, v in pairs:
            idx = pair_index(u, v, n)  # validates range and u != v
            if idx in seen:
                raise InvalidPairError(f"duplicate pair ({u}, {v})")
            seen.add(idx)
            us.append(min(u, v))
            vs.append(max(u, v))
        vals = np.array(values, dtype=np.float64)
        if vals.shape != (len(us),):
            raise InvalidParameterError(
                f"{len(us)} pairs but {vals.shape} values"
            )
        if not np.all(np.isfinite(vals)):
            raise InvalidParameterError("measurement values must be finite")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "us", np.array(us, dtype=np.intp))
        object.__setattr__(self, "vs", np.array(vs, dtype=np.intp))
        object.__setattr__(self, "values", vals)
        self.us.setflags(write=False)
        self.vs.setflags(write=False)
        vals.setflags(write=False)

    def __setattr__(self, name, value):
        raise AttributeError("MeasurementSet is immutable")

    def __len__(self):
        return int(self.us.shape[0])

    def pair_indices(self):
        """Linear pair indices of the entries, in entry order."""
        u = self.us
        n = self.n
        return u * n - u * (u + 1) // 2 + (self.vs - u - 1)

    def entries(self):
        return [
            (int(u), int(v), float(r))
            for u, v, r in zip(self.us, self.vs, self.values)
        ]

    def __repr__(self):
        return f"MeasurementSet(n={self.n}, pairs={len(self)})"


class NoiseSpec:
    """Relative Gaussian noise: variance sigma2 times the mean resistance."""

    __slots__ = ("sigma2", "seed")

    def __init__(self, sigma2=0.0, seed=0):
        if sigma2 < 0:
            raise InvalidParameterError(f"sigma2 must be >= 0, got {sigma2}")
        self.sigma2 = float(sigma2)
        self.seed = seed


def sample_size(n, f):
    """Rounded sample count floor(f * C(n,2) + 0.5)."""
    return int(np.floor(f * num_pairs(n) + 0.5))


def sample_pairs(n, f, seed=0):
    """Draw a fraction f of all unordered pairs, uniformly, no repeats.

    Returns the chosen (u, v) pairs sorted by pair index, which is a
    deterministic function of (n, f, seed).

    Raises
    ------
    InvalidParameterError
        If f is outside [0, 1].
    EmptySampleError
        If the rounded sample size is zero.
    """
    if not (0.0 <= f <= 1.0):
        raise InvalidParameterError(f"f must be in [0, 1], got {f}")
    total = num_pairs(n)
    size = sample_size(n, f)
    if size == 0:
        raise EmptySampleError(
            f"f={f} on {total} pairs rounds to an empty sample"
        )
    rng = np.random.default_rng(seed)
    chosen = np.sort(rng.choice(total, size=size, replace=False))
    us, vs = all_pairs(n)
    return [(int(us[i]), int(vs[i])) for i in chosen]


def measure(g, pairs, noise=None):
    """Measure effective resistances on the given pairs, plus noise.

    The noise is i.i.d. Gaussian with variance sigma2 times the mean
    resistance over all unordered pairs of g (not just the sampled
    ones). sigma2 = 0 reproduces the exact values. Negative noisy
    values are kept as is.
    """
    if noise is None:
        noise = NoiseSpec()
    lp = lap_pinv(g)
    us_all, vs_all = all_pairs(g.n)
    r_all = _kernels.pair_resistances(lp, us_all, vs_all)
    us = np.array([min(u, v) for u, v in pairs], dtype=np.intp)
    vs = np.array([max(u, v) for u, v in pairs], dtype=np.intp)
    r = _kernels.pair_resistances(lp, us, vs)
    sigma_bar = float(np.sqrt(noise.sigma2 * r_all.mean()))
    rng = np.random.default_rng(noise.seed)
    values = r + rng.normal(0.0, sigma_bar, size=r.shape[0])
    return MeasurementSet(g.n, list(zip(us.tolist(), vs.tolist())), values)


def write_measurements(ms, path):
    """Write the CSV format: header 'n <count>', then 'u,v,rbar' lines."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"n {ms.n}\n")
        for u, v, r in ms.entries():
            fh.write(f"{u},{v},{r:.17g}\n")


def read_measurements(path):
    """Read the CSV format written by write_measurements.

    '#' comments and blank lines are ignored. Duplicate pairs, u = v,
    and malformed lines raise FileFormatError with the line number.
    """
    n = None
    pairs = []
    values = []
    seen = set()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if n is None:
                parts = line.split()
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
            parts = [p.strip() for p in line.split(",")]
            if len(parts) != 3:
                raise FileFormatError(
                    f"expected 'u,v,rbar', got {line!r}", path=path, line=lineno
                )
            try:
                u, v = int(parts[0]), int(parts[1])
                r = float(parts[2])
            except ValueError:
                raise FileFormatError(
                    f"could not parse entry {line!r}", path=path, line=lineno
                ) from None
            if u == v or not (0 <= u < n) or not (0 <= v < n):
                raise FileFormatError(
                    f"invalid pair ({u}, {v}) for n={n}", path=path, line=lineno
                )
            key = (min(u, v), max(u, v))
            if key in seen:
                raise FileFormatError(
                    f"duplicate pair ({u}, {v})", path=path, line=lineno
                )
            if not np.isfinite(r):
                raise FileFormatError(
                    f"value must be finite, got {parts[2]}", path=path, line=lineno
                )
            seen.add(key)
            pairs.append(key)
            values.append(r)
    if n is None:
        raise FileFormatError("empty measurement file (no header)", path=path)
    return MeasurementSet(n, pairs, values)
