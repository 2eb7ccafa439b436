# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for truncated polynomial products and batch evaluation."""

import numpy as np


def mul_truncated(const double complex[::1] a, const double complex[::1] b,
                  const long long[::1] keys, const long long[::1] degs,
                  const long long[::1] lookup, long long cap):
    cdef Py_ssize_t m = a.shape[0]
    out = np.zeros(m, dtype=np.complex128)
    cdef double complex[::1] o = out
    cdef long long[::1] ia = np.flatnonzero(np.asarray(a)).astype(np.int64)
    cdef long long[::1] ib = np.flatnonzero(np.asarray(b)).astype(np.int64)
    cdef Py_ssize_t na = ia.shape[0], nb = ib.shape[0]
    cdef Py_ssize_t x, y, i, j
    cdef long long room
    cdef bint truncated = False
    cdef double complex ai
    # basis is graded: degs is non-decreasing along the index
    for x in range(na):
        i = ia[x]
        ai = a[i]
        room = cap - degs[i]
        for y in range(nb):
            j = ib[y]
            if degs[j] > room:
                truncated = True
                break
            o[lookup[keys[i] + keys[j]]] += ai * b[j]
    return out, bool(truncated)


def eval_many(const double complex[::1] c, const long long[:, ::1] exps,
              const double complex[:, ::1] Z, long long maxdeg):
    cdef Py_ssize_t P = Z.shape[0], n = Z.shape[1], M = c.shape[0]
    out = np.zeros(P, dtype=np.complex128)
    cdef double complex[::1] o = out
    pw_arr = np.empty((n, maxdeg + 1), dtype=np.complex128)
    cdef double complex[:, ::1] pw = pw_arr
    cdef long long[::1] nz = np.flatnonzero(np.asarray(c)).astype(np.int64)
    cdef Py_ssize_t nnz = nz.shape[0]
    cdef Py_ssize_t p, i, k, t, mm
    cdef double complex acc, term
    for p in range(P):
        for i in range(n):
            pw[i, 0] = 1.0
            for k in range(1, maxdeg + 1):
                pw[i, k] = pw[i, k - 1] * Z[p, i]
        acc = 0.0
        for t in range(nnz):
            mm = nz[t]
            term = c[mm]
            for i in range(n):
                term = term * pw[i, exps[mm, i]]
            acc = acc + term
        o[p] = acc
    return out
