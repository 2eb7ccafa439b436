"""Pure NumPy implementations of the hot kernels (used when ``_core`` is not built)."""

import numpy as np

_EVAL_CHUNK = 4096


def mul_truncated(a, b, keys, degs, lookup, cap):
    """Truncated product of two coefficient vectors on the same monomial basis.

    Returns ``(out, truncated)`` where ``truncated`` tells whether a nonzero
    product term of degree > ``cap`` was dropped.
    """
    out = np.zeros(a.shape[0], dtype=np.complex128)
    ia = np.flatnonzero(a)
    ib = np.flatnonzero(b)
    if ia.size == 0 or ib.size == 0:
        return out, False
    dsum = degs[ia][:, None] + degs[ib][None, :]
    keep = dsum <= cap
    truncated = bool((~keep).any())
    target = lookup[(keys[ia][:, None] + keys[ib][None, :])[keep]]
    prod = (a[ia][:, None] * b[ib][None, :])[keep]
    m = a.shape[0]
    out.real = np.bincount(target, weights=prod.real, minlength=m)
    out.imag = np.bincount(target, weights=prod.imag, minlength=m)
    return out, truncated


def eval_many(c, exps, Z, maxdeg):
    """Evaluate sum_m c_m Z^exps[m] at every row of ``Z``."""
    nz = np.flatnonzero(c)
    P = Z.shape[0]
    out = np.zeros(P, dtype=np.complex128)
    if nz.size == 0:
        return out
    cz = c[nz]
    ez = exps[nz]
    n = Z.shape[1]
    ks = np.arange(maxdeg + 1)
    for start in range(0, P, _EVAL_CHUNK):
        blk = Z[start:start + _EVAL_CHUNK]
        pw = blk[:, :, None] ** ks[None, None, :]
        mon = pw[:, 0, ez[:, 0]]
        for i in range(1, n):
            mon = mon * pw[:, i, ez[:, i]]
        out[start:start + blk.shape[0]] = mon @ cz
    return out
