"""Space parameters (n, s, p), points of the unit ball and finite point sequences."""

from __future__ import annotations

import dataclasses
import math
import warnings
from typing import NamedTuple, Sequence

import numpy as np

from .errors import ErrorKind, ToolkitError

INF = math.inf


def conjugate_exponent(q: float) -> float:
    """Return q' with 1/q + 1/q' = 1 (``inf`` for q = 1, 1 for q = inf)."""
    if q == 1:
        return INF
    if q == INF:
        return 1.0
    return q / (q - 1.0)


@dataclasses.dataclass(frozen=True)
class SpaceParams:
    """The triple (n, s, p) describing H_s^p of the unit ball of C^n.

    ``s <= n/p`` is a soft bound: with ``override_sp_bound`` the check becomes a
    warning and ``sp_bound_exceeded`` is set so reports can flag it.
    """

    n: int
    s: float
    p: float = 2.0
    override_sp_bound: bool = False

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise ToolkitError(ErrorKind.InvalidParams, f"n must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        if not math.isfinite(self.s) or self.s < 0:
            raise ToolkitError(ErrorKind.InvalidParams, f"s must be a finite non-negative real, got {self.s!r}")
        if not (self.p >= 1) or not math.isfinite(self.p):
            raise ToolkitError(ErrorKind.InvalidParams, f"p must lie in [1, inf), got {self.p!r}")
        if math.isclose(self.s, self.n / 2, rel_tol=0, abs_tol=1e-14):
            raise ToolkitError(ErrorKind.LogKernelCase, f"s = n/2 = {self.n / 2}: the model kernel has a logarithm")
        if self.s * self.p > self.n + 1e-12:
            if not self.override_sp_bound:
                raise ToolkitError(
                    ErrorKind.InvalidParams,
                    f"s = {self.s} exceeds n/p = {self.n / self.p}; set override_sp_bound to explore",
                )
            warnings.warn(f"s = {self.s} > n/p = {self.n / self.p} (override_sp_bound set)", stacklevel=3)

    @property
    def p_prime(self) -> float:
        return conjugate_exponent(self.p)

    @property
    def rho(self) -> float:
        return self.n - 2 * self.s

    @property
    def sp_bound_exceeded(self) -> bool:
        return self.s * self.p > self.n + 1e-12

    @property
    def s_is_integer(self) -> bool:
        return float(self.s).is_integer()

    def kernel_exp(self, q: float) -> float:
        """Exponent e in ||k_a||_{H_s^q} ~ (1 - |a|^2)^e, namely s - n/q'."""
        qp = conjugate_exponent(q)
        return self.s - (0.0 if qp == INF else self.n / qp)

    def replace(self, **kw) -> "SpaceParams":
        return dataclasses.replace(self, **kw)

    def to_dict(self) -> dict:
        return {"n": self.n, "s": self.s, "p": self.p, "override_sp_bound": self.override_sp_bound}


class Exponents(NamedTuple):
    p_prime: float
    rho: float
    kernel_norm_exp_p: float
    kernel_norm_exp_pprime: float


def derive_exponents(params: SpaceParams) -> Exponents:
    return Exponents(
        p_prime=params.p_prime,
        rho=params.rho,
        kernel_norm_exp_p=params.kernel_exp(params.p),
        kernel_norm_exp_pprime=params.kernel_exp(params.p_prime),
    )


def sobolev_embedding_q(params: SpaceParams) -> float:
    """Exponent q of the embedding H_s^p into H^q, 1/q = 1/p - s/n."""
    inv = 1.0 / params.p - params.s / params.n
    if inv <= 0:
        raise ToolkitError(ErrorKind.InvalidParams, f"sp = {params.s * params.p} >= n = {params.n}: no finite q")
    return 1.0 / inv


def as_point(coords, n: int | None = None) -> np.ndarray:
    """Validate ``coords`` as a point of the open unit ball and return a complex vector."""
    z = np.atleast_1d(np.asarray(coords, dtype=complex))
    if z.ndim != 1:
        raise ToolkitError(ErrorKind.InvalidParams, "a point must be a 1-d coordinate vector")
    if n is not None and z.shape[0] != n:
        raise ToolkitError(ErrorKind.InvalidParams, f"point has dimension {z.shape[0]}, expected {n}")
    r2 = float(np.vdot(z, z).real)
    if not r2 < 1.0:
        raise ToolkitError(ErrorKind.PointOutsideBall, f"|z|^2 = {r2} is not < 1")
    return z


def inner(z: np.ndarray, w: np.ndarray) -> complex:
    """Hermitian product <z, w> = sum z_i conj(w_i)."""
    return complex(np.dot(z, np.conj(w)))


@dataclasses.dataclass(frozen=True, eq=False)
class PointSeq:
    """A finite sequence of distinct points of the open ball."""

    params: SpaceParams
    points: np.ndarray
    labels: tuple = ()

    def __post_init__(self):
        n = self.params.n
        pts = np.asarray(self.points, dtype=complex)
        if pts.size == 0:
            pts = np.zeros((0, n), dtype=complex)
        if pts.ndim == 1 and n == 1:
            pts = pts.reshape(-1, 1)
        if pts.ndim != 2 or pts.shape[1] != n:
            raise ToolkitError(ErrorKind.InvalidParams, f"points must have shape (N, {n})")
        for z in pts:
            as_point(z, n)
        for i in range(len(pts)):
            for j in range(i):
                if np.allclose(pts[i], pts[j], rtol=0, atol=1e-15):
                    raise ToolkitError(ErrorKind.InvalidParams, f"points {j} and {i} coincide")
        pts = pts.copy()
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        labels = tuple(self.labels) if self.labels else tuple(f"a{i + 1}" for i in range(len(pts)))
        if len(labels) != len(pts):
            raise ToolkitError(ErrorKind.InvalidParams, "labels and points differ in length")
        object.__setattr__(self, "labels", labels)

    def __len__(self):
        return self.points.shape[0]

    def __iter__(self):
        return iter(self.points)

    def __getitem__(self, i):
        return self.points[i]

    @property
    def norms_sq(self) -> np.ndarray:
        return np.sum(np.abs(self.points) ** 2, axis=1)

    @classmethod
    def from_points(cls, params: SpaceParams, points: Sequence, labels=()) -> "PointSeq":
        return cls(params, np.asarray(points, dtype=complex).reshape(-1, params.n), tuple(labels))
