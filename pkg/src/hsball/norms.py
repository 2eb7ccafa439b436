"""Sphere integration and the H^p / H_s^p norms of polynomials.

Every function representable here is a polynomial, so the sup over r < 1 in the
norm definition is attained at r = 1 and all integrals are taken on the sphere.
"""

from __future__ import annotations

import dataclasses
import enum
import functools
import json
import math
import warnings
from fractions import Fraction

import numpy as np

from .config import settings
from .errors import ErrorKind, ToolkitError
from .params import SpaceParams
from .polyfn import PolyFn, basis, bracket_shift, mul, radial_derivative


class QuadMode(str, enum.Enum):
    ExactMoments = "ExactMoments"
    MonteCarlo = "MonteCarlo"


class Flavor(str, enum.Enum):
    FractionalShift = "FractionalShift"
    MaxDerivative = "MaxDerivative"


def moment_fraction(alpha, beta, n: int) -> Fraction:
    """Exact integral of z^alpha conj(z)^beta against normalized surface measure."""
    alpha, beta = tuple(alpha), tuple(beta)
    if len(alpha) != n or len(beta) != n:
        raise ToolkitError(ErrorKind.InvalidParams, f"multi-indices must have length {n}")
    if alpha != beta:
        return Fraction(0)
    num = math.factorial(n - 1) * math.prod(math.factorial(a) for a in alpha)
    return Fraction(num, math.factorial(n - 1 + sum(alpha)))


def monomial_moment(alpha, beta, n: int) -> float:
    return float(moment_fraction(alpha, beta, n))


@functools.lru_cache(maxsize=64)
def moment_weights(n: int, cap: int) -> np.ndarray:
    """w_alpha = ||z^alpha||^2_{L^2(sigma)} on the graded basis."""
    b = basis(n, cap)
    logw = (
        math.lgamma(n)
        + np.array([sum(math.lgamma(a + 1) for a in e) for e in b.exps.tolist()])
        - np.array([math.lgamma(n + int(d)) for d in b.degs])
    )
    w = np.exp(logw)
    w.setflags(write=False)
    return w


def hs2_weights(n: int, cap: int, s: float) -> np.ndarray:
    b = basis(n, cap)
    return (1.0 + b.degs) ** (2.0 * s) * moment_weights(n, cap)


def hs2_inner(f: PolyFn, g: PolyFn, params: SpaceParams) -> complex:
    """<f, g> in H_s^2, sum (1+|alpha|)^{2s} w_alpha f_alpha conj(g_alpha)."""
    a, b = f._align(g)
    W = hs2_weights(a.n, a.cap, params.s)
    return complex(np.sum(W * a.coeffs * np.conj(b.coeffs)))


def hs2_norm(f: PolyFn, params: SpaceParams) -> float:
    return math.sqrt(max(hs2_inner(f, f, params).real, 0.0))


@dataclasses.dataclass(frozen=True)
class QuadratureSpec:
    mode: QuadMode = QuadMode.ExactMoments
    sample_count: int = 200_000
    seed: int = 42

    def __post_init__(self):
        object.__setattr__(self, "mode", QuadMode(self.mode))
        if self.mode is QuadMode.MonteCarlo and self.sample_count < 1000:
            raise ToolkitError(ErrorKind.InvalidParams, "MonteCarlo needs at least 1000 samples")

    @classmethod
    def monte_carlo(cls, sample_count=None, seed=None):
        return cls(
            QuadMode.MonteCarlo,
            settings.mc_samples if sample_count is None else int(sample_count),
            settings.seed if seed is None else int(seed),
        )


@dataclasses.dataclass
class NormReport:
    value: float
    stderr: float = 0.0
    mode: str = QuadMode.ExactMoments.value
    per_j: list = dataclasses.field(default_factory=list)

    def to_dict(self) -> dict:
        return {"value": self.value, "stderr": self.stderr, "mode": self.mode, "per_j": list(self.per_j)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


# sampling -----------------------------------------------------------------

def _chunk_sizes(count: int, chunk: int):
    full, rest = divmod(count, chunk)
    return [chunk] * full + ([rest] if rest else [])


@functools.lru_cache(maxsize=8)
def _sphere_cached(n: int, count: int, seed: int, chunk: int) -> np.ndarray:
    sizes = _chunk_sizes(count, chunk)
    streams = np.random.SeedSequence(seed).spawn(len(sizes))
    parts = []
    for size, ss in zip(sizes, streams):
        g = np.random.default_rng(ss).standard_normal((size, 2 * n))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        parts.append(g[:, :n] + 1j * g[:, n:])
    out = np.concatenate(parts) if parts else np.zeros((0, n), dtype=complex)
    out.setflags(write=False)
    return out


def sphere_samples(n: int, count: int, seed: int | None = None, chunk: int | None = None) -> np.ndarray:
    """Uniform points on the unit sphere of C^n.

    Each chunk has its own spawned stream and chunks are concatenated in index
    order, so the result depends only on (n, count, seed, chunk).
    """
    seed = settings.seed if seed is None else int(seed)
    chunk = settings.mc_chunk if chunk is None else int(chunk)
    return _sphere_cached(int(n), int(count), seed, chunk)


def ball_samples(n: int, count: int, seed: int | None = None, max_radius: float = 1.0) -> np.ndarray:
    """Uniform points of the ball of radius ``max_radius`` in C^n (real dimension 2n)."""
    seed = settings.seed if seed is None else int(seed)
    rng = np.random.default_rng(np.random.SeedSequence([seed, 1]))
    u = sphere_samples(n, count, seed)
    r = max_radius * rng.random(count) ** (1.0 / (2 * n))
    return u * r[:, None]


# norms --------------------------------------------------------------------

def _even_power(p: float):
    return float(p).is_integer() and int(p) % 2 == 0 and p >= 2


def hp_norm(g: PolyFn, p: float, quad: QuadratureSpec | None = None) -> NormReport:
    """||g||_{H^p} from the boundary values on the sphere."""
    quad = quad or QuadratureSpec()
    if g.is_zero():
        return NormReport(0.0, 0.0, quad.mode.value)
    if quad.mode is QuadMode.ExactMoments and _even_power(p):
        k = int(p) // 2
        if k == 1:
            h = g
        else:
            cap = max(g.cap, g.degree * k)
            h = PolyFn.const(1.0, g.n, cap)
            gg = g.with_cap(cap)
            for _ in range(k):
                h = mul(h, gg, strict=False, cap=cap)
        val = float(np.sum(moment_weights(h.n, h.cap) * np.abs(h.coeffs) ** 2))
        return NormReport(val ** (1.0 / p), 0.0, QuadMode.ExactMoments.value)
    return _mc_norm(g, p, quad.sample_count, quad.seed)


def _mc_norm(g: PolyFn, p: float, count: int, seed: int) -> NormReport:
    Z = sphere_samples(g.n, count, seed)
    x = np.abs(g(Z)) ** p
    m = float(np.mean(x))
    se = float(np.std(x, ddof=1) / math.sqrt(len(x)))
    value = m ** (1.0 / p)
    # delta method for m -> m^{1/p}
    stderr = value * se / (p * m) if m > 0 else 0.0
    if value > 0 and stderr / value > settings.mc_rel_tol:
        raise ToolkitError(
            ErrorKind.QuadratureUnderResolved,
            f"relative stderr {stderr / value:.3g} exceeds {settings.mc_rel_tol} with {count} samples",
        )
    return NormReport(value, stderr, QuadMode.MonteCarlo.value)


def hsp_norm(f: PolyFn, params: SpaceParams, quad: QuadratureSpec | None = None,
             flavor: Flavor | str = Flavor.FractionalShift) -> NormReport:
    """H_s^p norm of a polynomial.

    FractionalShift: ||(I+R)^s f||_{H^p}.
    MaxDerivative: max_{0<=j<=s} ||R^j f||_{H^p}, integer s only; per_j holds each term.
    """
    flavor = Flavor(flavor)
    if flavor is Flavor.FractionalShift:
        return hp_norm(bracket_shift(f, params.s), params.p, quad)
    if not params.s_is_integer:
        raise ToolkitError(ErrorKind.InvalidParams, f"MaxDerivative needs integer s, got {params.s}")
    reports = [hp_norm(radial_derivative(f, j), params.p, quad) for j in range(int(params.s) + 1)]
    best = max(reports, key=lambda r: r.value)
    return NormReport(best.value, best.stderr, best.mode, [r.value for r in reports])


def young_ratio(n: int, s: float, p: float, q: float, pairs: int = 100, degree: int = 4,
                seed: int | None = None, quad: QuadratureSpec | None = None) -> dict:
    """Largest ||fg||_{H_s^r} / (||f||_{H_s^p} ||g||_{H_s^q}) over seeded random pairs, 1/r = 1/p + 1/q.

    The sp <= n bound is not needed for the product estimate, so it is overridden.
    Even exponents are computed exactly; others use ``quad``.
    """
    r = 1.0 / (1.0 / p + 1.0 / q)
    if r < 1:
        raise ToolkitError(ErrorKind.InvalidParams, f"1/p + 1/q = {1 / r} > 1")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        pp, pq, pr = (SpaceParams(n, s, t, override_sp_bound=True) for t in (p, q, r))
    rng = np.random.default_rng(settings.seed if seed is None else seed)
    cap = 2 * degree
    worst = 0.0
    for _ in range(pairs):
        f = PolyFn.random(n, degree, rng, cap=cap)
        g = PolyFn.random(n, degree, rng, cap=cap)
        num = hsp_norm(mul(f, g, strict=True), pr, quad).value
        den = hsp_norm(f, pp, quad).value * hsp_norm(g, pq, quad).value
        worst = max(worst, num / den)
    return {"max_ratio": worst, "pairs": pairs, "r": r, "s": s, "p": p, "q": q}
