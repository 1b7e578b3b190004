# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels. Same contract as _fallback.py.

The inner loops keep the two lp rows of the current row pair hot in
cache and stream over the measurement columns, so the working set per
row pair is 2n doubles regardless of how many columns are requested.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def pair_resistances(const double[:, ::1] lp, const cnp.intp_t[::1] u, const cnp.intp_t[::1] v):
    cdef Py_ssize_t s = u.shape[0]
    cdef Py_ssize_t j
    out_arr = np.empty(s)
    cdef double[::1] out = out_arr
    for j in range(s):
        out[j] = lp[u[j], u[j]] + lp[v[j], v[j]] - 2.0 * lp[u[j], v[j]]
    return out_arr


def resistance_block(const double[:, ::1] lp, const cnp.intp_t[::1] a, const cnp.intp_t[::1] b,
                     const cnp.intp_t[::1] u, const cnp.intp_t[::1] v):
    cdef Py_ssize_t m = a.shape[0]
    cdef Py_ssize_t s = u.shape[0]
    cdef Py_ssize_t i, j
    cdef const double *ra
    cdef const double *rb
    out_arr = np.empty((m, s))
    cdef double[:, ::1] out = out_arr
    for i in range(m):
        ra = &lp[a[i], 0]
        rb = &lp[b[i], 0]
        for j in range(s):
            out[i, j] = ra[u[j]] - ra[v[j]] - rb[u[j]] + rb[v[j]]
    return out_arr


def grad_accumulate(const double[:, ::1] lp, const cnp.intp_t[::1] a, const cnp.intp_t[::1] b,
                    const cnp.intp_t[::1] u, const cnp.intp_t[::1] v, const double[::1] delta):
    cdef Py_ssize_t m = a.shape[0]
    cdef Py_ssize_t s = u.shape[0]
    cdef Py_ssize_t i, j
    cdef double acc, rij
    cdef const double *ra
    cdef const double *rb
    out_arr = np.zeros(m)
    cdef double[::1] out = out_arr
    for i in range(m):
        ra = &lp[a[i], 0]
        rb = &lp[b[i], 0]
        acc = 0.0
        for j in range(s):
            rij = ra[u[j]] - ra[v[j]] - rb[u[j]] + rb[v[j]]
            acc += rij * rij * delta[j]
        out[i] = acc
    return out_arr
