"""Truncated holomorphic polynomials in n complex variables.

A :class:`PolyFn` stores its coefficients densely on the graded lexicographic
monomial basis of degree <= cap (degree ascending, then exponent tuples in
descending lexicographic order, so ``z1**2`` precedes ``z1*z2`` precedes ``z2**2``).
The radial derivative R = sum z_j d/dz_j acts diagonally on that basis with
eigenvalue |alpha|, so every R-calculus operation here is exact.
"""

from __future__ import annotations

import functools
import json
import math
from typing import Iterable, Mapping

import numpy as np

from . import _backend
from .config import settings
from .errors import ErrorKind, ToolkitError


def _graded_exponents(n: int, cap: int) -> list[tuple[int, ...]]:
    def of_degree(k, nvar):
        if nvar == 1:
            yield (k,)
            return
        for first in range(k, -1, -1):
            for rest in of_degree(k - first, nvar - 1):
                yield (first,) + rest

    out = []
    for k in range(cap + 1):
        out.extend(of_degree(k, n))
    return out


class MonomialBasis:
    """Index tables for the monomials z^alpha with |alpha| <= cap in n variables."""

    def __init__(self, n: int, cap: int):
        if (cap + 1) ** n > 50_000_000:
            raise ToolkitError(ErrorKind.DegreeOverflow, f"basis n={n}, cap={cap} too large")
        self.n = n
        self.cap = cap
        exps = _graded_exponents(n, cap)
        self.exps = np.array(exps, dtype=np.int64).reshape(len(exps), n)
        self.degs = self.exps.sum(axis=1).astype(np.int64)
        radix = (cap + 1) ** np.arange(n, dtype=np.int64)
        self.keys = (self.exps @ radix).astype(np.int64)
        self.lookup = np.full((cap + 1) ** n, -1, dtype=np.int64)
        self.lookup[self.keys] = np.arange(len(exps), dtype=np.int64)
        self.index = {e: i for i, e in enumerate(exps)}
        self.size = len(exps)
        # log(alpha!) for moments and kernel coefficients; plain factorials overflow past 170
        self.log_alpha_fact = np.array([sum(math.lgamma(a + 1) for a in e) for e in exps], dtype=float)
        for arr in (self.exps, self.degs, self.keys, self.lookup, self.log_alpha_fact):
            arr.setflags(write=False)

    def count_upto(self, degree: int) -> int:
        """Number of monomials of degree <= ``degree``."""
        return math.comb(degree + self.n, self.n)


@functools.lru_cache(maxsize=64)
def basis(n: int, cap: int) -> MonomialBasis:
    return MonomialBasis(n, cap)


class PolyFn:
    """Truncated power series sum_{|alpha| <= cap} c_alpha z^alpha.

    Instances are treated as immutable; arithmetic returns new objects.
    ``truncated`` records whether a product ever dropped terms above the cap.
    """

    __slots__ = ("n", "cap", "coeffs", "truncated")

    def __init__(self, n: int, cap: int, coeffs=None, truncated: bool = False):
        self.n = int(n)
        self.cap = int(cap)
        b = basis(self.n, self.cap)
        if coeffs is None:
            c = np.zeros(b.size, dtype=np.complex128)
        else:
            c = np.array(coeffs, dtype=np.complex128)
            if c.shape != (b.size,):
                raise ToolkitError(ErrorKind.InvalidParams, f"expected {b.size} coefficients, got {c.shape}")
        c[np.abs(c) < settings.prune_tol] = 0
        c.setflags(write=False)
        self.coeffs = c
        self.truncated = bool(truncated)

    # construction ---------------------------------------------------------
    @property
    def basis(self) -> MonomialBasis:
        return basis(self.n, self.cap)

    @classmethod
    def zero(cls, n, cap=None):
        return cls(n, settings.degree_cap if cap is None else cap)

    @classmethod
    def const(cls, value, n, cap=None):
        cap = settings.degree_cap if cap is None else cap
        c = np.zeros(basis(n, cap).size, dtype=np.complex128)
        c[0] = value
        return cls(n, cap, c)

    @classmethod
    def monomial(cls, alpha, coeff=1.0, cap=None):
        return cls.from_terms({tuple(alpha): coeff}, len(alpha), cap)

    @classmethod
    def variable(cls, i, n, cap=None):
        alpha = [0] * n
        alpha[i] = 1
        return cls.monomial(alpha, 1.0, cap)

    @classmethod
    def from_terms(cls, terms: Mapping, n: int, cap=None):
        cap = settings.degree_cap if cap is None else cap
        b = basis(n, cap)
        c = np.zeros(b.size, dtype=np.complex128)
        dropped = False
        for alpha, v in terms.items():
            alpha = tuple(int(a) for a in alpha)
            if len(alpha) != n:
                raise ToolkitError(ErrorKind.InvalidParams, f"multi-index {alpha} has length != {n}")
            if sum(alpha) > cap:
                dropped = dropped or v != 0
                continue
            c[b.index[alpha]] += v
        return cls(n, cap, c, truncated=dropped)

    @classmethod
    def random(cls, n, degree, rng, cap=None, scale=1.0):
        """Random polynomial of the given degree with complex Gaussian coefficients."""
        cap = max(degree, settings.degree_cap if cap is None else cap)
        b = basis(n, cap)
        c = np.zeros(b.size, dtype=np.complex128)
        k = b.count_upto(degree)
        c[:k] = scale * (rng.standard_normal(k) + 1j * rng.standard_normal(k)) / math.sqrt(2)
        return cls(n, cap, c)

    def _like(self, coeffs, truncated=None):
        return PolyFn(self.n, self.cap, coeffs, self.truncated if truncated is None else truncated)

    def with_cap(self, cap: int) -> "PolyFn":
        """Re-express on the basis of degree <= ``cap`` (dropping terms above it)."""
        cap = int(cap)
        if cap == self.cap:
            return self
        new = basis(self.n, cap)
        c = np.zeros(new.size, dtype=np.complex128)
        k = min(new.size, self.basis.size)
        c[:k] = self.coeffs[:k]
        dropped = cap < self.cap and bool(np.any(self.coeffs[k:] != 0))
        return PolyFn(self.n, cap, c, self.truncated or dropped)

    # inspection -----------------------------------------------------------
    @property
    def degree(self) -> int:
        nz = np.flatnonzero(self.coeffs)
        return int(self.basis.degs[nz[-1]]) if nz.size else -1

    def coeff(self, alpha) -> complex:
        alpha = tuple(alpha)
        if sum(alpha) > self.cap:
            return 0j
        return complex(self.coeffs[self.basis.index[alpha]])

    def terms(self) -> dict:
        """Nonzero coefficients as ``{alpha: c}`` in basis order."""
        b = self.basis
        return {tuple(int(x) for x in b.exps[i]): complex(self.coeffs[i]) for i in np.flatnonzero(self.coeffs)}

    def is_zero(self) -> bool:
        return not np.any(self.coeffs)

    def __repr__(self):
        return f"PolyFn(n={self.n}, cap={self.cap}, terms={len(np.flatnonzero(self.coeffs))}, truncated={self.truncated})"

    # evaluation -----------------------------------------------------------
    def __call__(self, z):
        """Evaluate at one point (shape (n,)) or at many points (shape (P, n))."""
        Z = np.asarray(z, dtype=np.complex128)
        single = Z.ndim == 0 or (Z.ndim == 1 and Z.shape[0] == self.n)
        Z = np.ascontiguousarray(Z.reshape(-1, self.n))
        deg = max(self.degree, 0)
        vals = _backend.eval_many(self.coeffs, self.basis.exps, Z, deg)
        return complex(vals[0]) if single else vals

    eval = __call__

    # linear structure -----------------------------------------------------
    def _align(self, other):
        if not isinstance(other, PolyFn):
            return self, PolyFn.const(other, self.n, self.cap)
        if other.n != self.n:
            raise ToolkitError(ErrorKind.InvalidParams, f"dimension mismatch {self.n} != {other.n}")
        cap = max(self.cap, other.cap)
        return self.with_cap(cap), other.with_cap(cap)

    def __add__(self, other):
        a, b = self._align(other)
        return a._like(a.coeffs + b.coeffs, a.truncated or b.truncated)

    __radd__ = __add__

    def __neg__(self):
        return self._like(-self.coeffs)

    def __sub__(self, other):
        a, b = self._align(other)
        return a._like(a.coeffs - b.coeffs, a.truncated or b.truncated)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, PolyFn):
            return mul(self, other)
        return self._like(self.coeffs * complex(other))

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self._like(self.coeffs / complex(scalar))

    def __pow__(self, k: int):
        if int(k) != k or k < 0:
            raise ValueError("only non-negative integer powers")
        out = PolyFn.const(1.0, self.n, self.cap)
        for _ in range(int(k)):
            out = mul(out, self)
        return out

    def max_abs_diff(self, other) -> float:
        a, b = self._align(other)
        return float(np.max(np.abs(a.coeffs - b.coeffs), initial=0.0))

    # serialization --------------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "cap": self.cap,
            "terms": [
                {"alpha": list(alpha), "re": c.real, "im": c.imag} for alpha, c in self.terms().items()
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: Mapping) -> "PolyFn":
        terms = {tuple(t["alpha"]): complex(t["re"], t["im"]) for t in d["terms"]}
        return cls.from_terms(terms, int(d["n"]), int(d["cap"]))

    @classmethod
    def from_json(cls, s: str) -> "PolyFn":
        return cls.from_dict(json.loads(s))


def mul(f: PolyFn, g: PolyFn, strict: bool | None = None, cap: int | None = None) -> PolyFn:
    """Product f*g truncated at degree ``cap`` (default: the larger of the two caps).

    In strict mode a product that would drop nonzero terms raises DegreeOverflow.
    """
    if f.n != g.n:
        raise ToolkitError(ErrorKind.InvalidParams, f"dimension mismatch {f.n} != {g.n}")
    cap = max(f.cap, g.cap) if cap is None else int(cap)
    strict = settings.strict if strict is None else strict
    a, b = f.with_cap(cap), g.with_cap(cap)
    B = basis(f.n, cap)
    out, dropped = _backend.mul_truncated(a.coeffs, b.coeffs, B.keys, B.degs, B.lookup, cap)
    if dropped and strict:
        raise ToolkitError(ErrorKind.DegreeOverflow, f"product exceeds degree cap {cap}")
    return PolyFn(f.n, cap, out, a.truncated or b.truncated or dropped)


def product(factors: Iterable[PolyFn], n: int, cap: int, strict: bool | None = None) -> PolyFn:
    out = PolyFn.const(1.0, n, cap)
    for f in factors:
        out = mul(out, f, strict=strict, cap=cap)
    return out


def radial_derivative(f: PolyFn, j: int = 1) -> PolyFn:
    """R^j f, using R z^alpha = |alpha| z^alpha."""
    if j < 0:
        raise ToolkitError(ErrorKind.InvalidParams, "j must be non-negative")
    if j == 0:
        return f
    return f._like(f.coeffs * f.basis.degs.astype(float) ** j)


def bracket_shift(f: PolyFn, s: float) -> PolyFn:
    """(I + R)^s f for any real s."""
    if s == 0:
        return f
    return f._like(f.coeffs * (1.0 + f.basis.degs) ** float(s))


def leibniz_rj(f: PolyFn, g: PolyFn, j: int, strict: bool | None = None) -> PolyFn:
    """sum_k C(j, k) R^k(f) R^{j-k}(g), which equals R^j(fg) when nothing is truncated."""
    cap = max(f.cap, g.cap)
    out = PolyFn.zero(f.n, cap)
    for k in range(j + 1):
        out = out + math.comb(j, k) * mul(radial_derivative(f, k), radial_derivative(g, j - k), strict=strict, cap=cap)
    return out
