"""Exact coefficient tables for radial derivatives of products gamma^l h.

Exclusion:  R^j(gamma^l h) = sum_{q<=m} A_q gamma^{l-q} R^j(gamma^q h),  m = min(l, j)
Inclusion:  R^j(gamma^l) h = sum_q A_{j,q} R^q(gamma^l R^{j-q} h)

Two independent routes are provided for each table: the F_{k,j} recurrence in
exact rationals, and a sympy linear solve against the free derivation
R g_i = g_{i+1}, R h_i = h_{i+1} (g_i standing for R^i gamma, h_i for R^i h).
"""

from __future__ import annotations

import csv
import functools
import io
import math
from fractions import Fraction

import numpy as np
import sympy as sp

from .config import settings
from .errors import ErrorKind, ToolkitError
from .polyfn import PolyFn, mul, radial_derivative


def falling(l: int, k: int) -> int:
    out = 1
    for i in range(k):
        out *= l - i
    return out


# recurrence path ------------------------------------------------------------

@functools.lru_cache(maxsize=None)
def alpha_row(k: int) -> tuple:
    """alpha^{(k)} with F_{k,j} = sum_i alpha_i gamma^{k-i} R^j(gamma^i h), any j >= k.

    From R^j(gamma^k h) = sum_m k!/(k-m)! gamma^{k-m} F_{m,j}:
    k! F_k = B_k - sum_{m<k} k!/(k-m)! gamma^{k-m} F_m, i.e.
    alpha^{(k)} = e_k/k! - sum_{m<k} alpha^{(m)}/(k-m)!.
    """
    row = [Fraction(0)] * (k + 1)
    row[k] = Fraction(1, math.factorial(k))
    for m in range(k):
        prev = alpha_row(m)
        for i, a in enumerate(prev):
            row[i] -= a / math.factorial(k - m)
    return tuple(row)


def f_table(j: int, k_max: int | None = None) -> dict:
    """{(k, j): alpha^{(k)}} for k <= min(k_max, j)."""
    if j < 0:
        raise ToolkitError(ErrorKind.InvalidParams, "j must be >= 0")
    k_max = j if k_max is None else min(int(k_max), j)
    return {(k, j): list(alpha_row(k)) for k in range(k_max + 1)}


def exclusion_coeffs(j: int, l: int) -> list:
    """(A_0, ..., A_m), m = min(l, j), A_q = sum_{k=q}^{m} l^(k) alpha^{(k)}_q."""
    if j < 0 or l < 0:
        raise ToolkitError(ErrorKind.InvalidParams, "j and l must be >= 0")
    m = min(l, j)
    if l <= j:
        return [Fraction(int(q == l)) for q in range(m + 1)]
    A = [Fraction(0)] * (m + 1)
    for k in range(m + 1):
        fk = falling(l, k)
        for q, a in enumerate(alpha_row(k)):
            A[q] += fk * a
    return A


def exclusion_lagrange(j: int, l: int) -> list:
    """Closed form for l > j: A_q = prod_{i != q, i <= j} (l - i)/(q - i)."""
    return [
        math.prod((Fraction(l - i, q - i) for i in range(j + 1) if i != q), start=Fraction(1))
        for q in range(j + 1)
    ]


@functools.lru_cache(maxsize=None)
def _inclusion_rec(j: int) -> tuple:
    A = [Fraction(0)] * (j + 1)
    A[j] = Fraction(1)
    for m in range(j):
        A[m] = -sum(math.comb(j, q) * _inclusion_rec(q)[m] for q in range(m, j))
    return tuple(A)


def inclusion_coeffs(j: int) -> list:
    """(A_{j,0}, ..., A_{j,j}) from g^{(j)} h = R^j(g h) - sum_{q<j} C(j,q) g^{(q)} h^{(j-q)}."""
    if j < 0:
        raise ToolkitError(ErrorKind.InvalidParams, "j must be >= 0")
    return list(_inclusion_rec(j))


# linear-solve path ----------------------------------------------------------

def _syms(J):
    g = sp.symbols(f"g0:{J + 2}")
    h = sp.symbols(f"h0:{J + 2}")
    return g, h


def _R(expr, g, h):
    out = 0
    for i in range(len(g) - 1):
        out += sp.diff(expr, g[i]) * g[i + 1] + sp.diff(expr, h[i]) * h[i + 1]
    return sp.expand(out)


def _Rj(expr, j, g, h):
    for _ in range(j):
        expr = _R(expr, g, h)
    return expr


def _solve_against(target, basis_exprs, symbols) -> list:
    unknowns = sp.symbols(f"c0:{len(basis_exprs)}")
    resid = sp.expand(target - sum(c * b for c, b in zip(unknowns, basis_exprs)))
    eqs = sp.Poly(resid, *symbols).coeffs()
    sol = sp.solve(eqs, unknowns, dict=True)
    if len(sol) != 1 or len(sol[0]) != len(unknowns):
        raise ToolkitError(ErrorKind.InvalidParams, "coefficient system not uniquely solvable")
    return [Fraction(int(sp.fraction(sol[0][c])[0]), int(sp.fraction(sol[0][c])[1])) for c in unknowns]


def exclusion_coeffs_symbolic(j: int, l: int) -> list:
    m = min(l, j)
    g, h = _syms(j)
    target = _Rj(g[0] ** l * h[0], j, g, h)
    basis_exprs = [g[0] ** (l - q) * _Rj(g[0] ** q * h[0], j, g, h) for q in range(m + 1)]
    return _solve_against(target, basis_exprs, list(g) + list(h))


def inclusion_coeffs_symbolic(j: int, l: int = 3) -> list:
    g, h = _syms(j)
    target = sp.expand(_Rj(g[0] ** l, j, g, h) * h[0])
    basis_exprs = [_Rj(g[0] ** l * h[j - q], q, g, h) for q in range(j + 1)]
    return _solve_against(target, basis_exprs, list(g) + list(h))


def f_symbolic(k: int, j: int):
    """F_{k,j} from its defining recursion, as an expression in g_i, h_i."""
    g, h = _syms(j)

    @functools.lru_cache(maxsize=None)
    def F(kk, jj):
        if kk == 0:
            return _Rj(h[0], jj, g, h)
        if kk > jj:
            return sp.Integer(0)
        if kk == jj:
            return sp.expand(g[1] * F(kk - 1, jj - 1))
        return sp.expand(g[1] * F(kk - 1, jj - 1) + _R(F(kk, jj - 1), g, h))

    return F(k, j), g, h


def f_row_symbolic(k: int, j: int) -> list:
    """alpha^{(k)} obtained by solving F_{k,j} against {gamma^{k-i} R^j(gamma^i h)}."""
    expr, g, h = f_symbolic(k, j)
    basis_exprs = [g[0] ** (k - i) * _Rj(g[0] ** i * h[0], j, g, h) for i in range(k + 1)]
    return _solve_against(expr, basis_exprs, list(g) + list(h))


# numeric verification -------------------------------------------------------

def verify_identities(j_max: int, l_max: int, trials: int = 50, seed: int | None = None, n: int = 1,
                      deg_gamma: int = 2, deg_h: int = 2) -> dict:
    """Both identities on seeded random polynomials, with a cap that avoids truncation.

    Residuals are relative: max|lhs - rhs| / max(1, max|lhs|) over coefficients.
    """
    seed = settings.seed if seed is None else seed
    rng = np.random.default_rng(seed)
    cap = deg_gamma * l_max + deg_h
    worst_ex = worst_in = 0.0
    for _ in range(trials):
        gam = PolyFn.random(n, deg_gamma, rng, cap=cap)
        h = PolyFn.random(n, deg_h, rng, cap=cap)
        pw = [PolyFn.const(1.0, n, cap)]
        for _ in range(l_max):
            pw.append(mul(pw[-1], gam, strict=True))
        prod = [mul(pw[q], h, strict=True) for q in range(l_max + 1)]
        for j in range(j_max + 1):
            Rprod = [radial_derivative(x, j) for x in prod]
            for l in range(l_max + 1):
                lhs = Rprod[l]
                A = exclusion_coeffs(j, l)
                rhs = PolyFn.zero(n, cap)
                for q, a in enumerate(A):
                    if a:
                        rhs = rhs + float(a) * mul(pw[l - q], Rprod[q], strict=True)
                worst_ex = max(worst_ex, lhs.max_abs_diff(rhs) / max(1.0, np.max(np.abs(lhs.coeffs))))
                # inclusion
                lhs2 = mul(radial_derivative(pw[l], j), h, strict=True)
                B = inclusion_coeffs(j)
                rhs2 = PolyFn.zero(n, cap)
                for q, a in enumerate(B):
                    rhs2 = rhs2 + float(a) * radial_derivative(mul(pw[l], radial_derivative(h, j - q), strict=True), q)
                worst_in = max(worst_in, lhs2.max_abs_diff(rhs2) / max(1.0, np.max(np.abs(lhs2.coeffs))))
    return {
        "max_residual": float(max(worst_ex, worst_in)),
        "exclusion_residual": float(worst_ex),
        "inclusion_residual": float(worst_in),
        "trials": trials,
        "j_max": j_max,
        "l_max": l_max,
    }


def coefficient_csv(j_max: int, l_max: int) -> str:
    """Rows j,l,q,numerator,denominator; inclusion rows leave l empty."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["table", "j", "l", "q", "numerator", "denominator"])
    for j in range(j_max + 1):
        for l in range(l_max + 1):
            for q, a in enumerate(exclusion_coeffs(j, l)):
                w.writerow(["exclusion", j, l, q, a.numerator, a.denominator])
    for j in range(j_max + 1):
        for q, a in enumerate(inclusion_coeffs(j)):
            w.writerow(["inclusion", j, "", q, a.numerator, a.denominator])
    return buf.getvalue()


def cross_check(j_max: int, l_max: int) -> dict:
    """Exact agreement of recurrence, Lagrange and sympy routes."""
    bad = []
    for j in range(j_max + 1):
        for l in range(l_max + 1):
            rec = exclusion_coeffs(j, l)
            if rec != exclusion_coeffs_symbolic(j, l):
                bad.append(("exclusion", j, l))
            if l > j and rec != exclusion_lagrange(j, l):
                bad.append(("lagrange", j, l))
        if inclusion_coeffs(j) != inclusion_coeffs_symbolic(j):
            bad.append(("inclusion", j))
        for k in range(j + 1):
            if list(alpha_row(k)) != f_row_symbolic(k, j):
                bad.append(("f_table", k, j))
    return {"agree": not bad, "mismatches": bad}
