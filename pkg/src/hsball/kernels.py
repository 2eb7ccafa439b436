"""Reproducing kernels, Gram matrices, pseudo-balls, Carleson box sweeps and separation."""

from __future__ import annotations

import csv
import dataclasses
import enum
import io
import math
import warnings

import numpy as np

from .config import settings
from .errors import ErrorKind, ToolkitError
from .norms import hs2_weights
from .params import PointSeq, SpaceParams, as_point, inner
from .polyfn import PolyFn, basis


class Convention(str, enum.Enum):
    Model = "Model"
    Exact = "Exact"


def _monomial_powers(points: np.ndarray, exps: np.ndarray) -> np.ndarray:
    """V[i, k] = points[i]^exps[k]."""
    pts = np.atleast_2d(points)
    V = np.ones((pts.shape[0], exps.shape[0]), dtype=complex)
    for d in range(exps.shape[1]):
        V *= pts[:, d : d + 1] ** exps[None, :, d]
    return V


def model_series_coeffs(rho: float, cap: int) -> np.ndarray:
    """(rho)_k / k! for k = 0..cap, the Taylor coefficients of (1-t)^{-rho}."""
    out = np.ones(cap + 1)
    for i in range(1, cap + 1):
        out[i] = out[i - 1] * (rho + i - 1) / i
    return out


@dataclasses.dataclass(frozen=True, eq=False)
class KernelFn:
    center: np.ndarray
    params: SpaceParams
    convention: Convention
    poly: PolyFn

    def __call__(self, z):
        return self.poly(z)

    def closed_form(self, z) -> complex:
        """Untruncated value; for the Exact convention this is the truncated sum itself."""
        if self.convention is Convention.Exact:
            return self.poly(z)
        return complex((1.0 - inner(np.asarray(z, dtype=complex), self.center)) ** (-self.params.rho))


def kernel(center, params: SpaceParams, convention=Convention.Model, cap: int | None = None) -> KernelFn:
    """Truncated reproducing kernel at ``center``.

    Model: Taylor polynomial of (1 - <z, a>)^{-(n-2s)}, coefficient (rho)_{|alpha|}/alpha! conj(a)^alpha.
    Exact: conj(a)^alpha / W_alpha, which reproduces hs2_inner on degree <= cap.
    """
    convention = Convention(convention)
    cap = settings.degree_cap if cap is None else int(cap)
    a = as_point(center, params.n)
    b = basis(params.n, cap)
    abar = _monomial_powers(np.conj(a), b.exps)[0]
    if convention is Convention.Model:
        if math.isclose(params.rho, 0.0, abs_tol=1e-14):
            raise ToolkitError(ErrorKind.LogKernelCase, "rho = 0: the model kernel is logarithmic")
        # (rho)_k/alpha! = [(rho)_k/k!] * multinomial(k; alpha)
        log_k = np.array([math.lgamma(int(d) + 1) for d in b.degs])
        c = model_series_coeffs(params.rho, cap)[b.degs] * np.exp(log_k - b.log_alpha_fact) * abar
    else:
        c = abar / hs2_weights(params.n, cap, params.s)
    return KernelFn(a, params, convention, PolyFn(params.n, cap, c))


def model_tail_degree(r2: float, rho: float, tol: float = 1e-14, limit: int = 400) -> int:
    """Smallest D with sum_{k>D} (rho)_k/k! r2^k below ``tol`` (relative to the full sum)."""
    full = (1.0 - r2) ** (-rho)
    acc, term = 0.0, 1.0
    for k in range(limit + 1):
        if k:
            term *= (rho + k - 1) / k * r2
        acc += term
        if abs(full - acc) <= tol * full:
            return k
    return limit


def kernel_norm_proxy(center, params: SpaceParams, q: float) -> float:
    """(1 - |a|^2)^{s - n/q'}, the canonical representative of ||k_a||_{H_s^q}."""
    a = np.asarray(center, dtype=complex)
    r2 = float(np.vdot(a, a).real)
    return (1.0 - r2) ** params.kernel_exp(q)


def proxies(seq: PointSeq, q: float) -> np.ndarray:
    return (1.0 - seq.norms_sq) ** seq.params.kernel_exp(q)


@dataclasses.dataclass(frozen=True, eq=False)
class GramMatrix:
    entries: np.ndarray
    convention: Convention
    params: SpaceParams
    cond: float

    def min_eig(self) -> float:
        if self.entries.size == 0:
            return 0.0
        return float(np.linalg.eigvalsh(self.entries)[0])

    def to_dict(self) -> dict:
        G = self.entries
        return {
            "convention": self.convention.value,
            "params": self.params.to_dict(),
            "re": G.real.tolist(),
            "im": G.imag.tolist(),
            "cond": self.cond,
            "min_eig": self.min_eig(),
        }


def model_gram_entries(points: np.ndarray, rho: float, cap: int | None = None) -> np.ndarray:
    """G[i, j] = K(a_i, a_j) = (1 - <a_i, a_j>)^{-rho}, or its degree-``cap`` Taylor truncation."""
    P = np.asarray(points, dtype=complex).reshape(len(points), -1)
    T = P @ P.conj().T
    if cap is None:
        G = (1.0 - T) ** (-rho)
    else:
        c = model_series_coeffs(rho, cap)
        G = np.zeros_like(T)
        for ck in c[::-1]:
            G = G * T + ck
    return 0.5 * (G + G.conj().T)


def exact_gram_entries(points: np.ndarray, params: SpaceParams, cap: int) -> np.ndarray:
    b = basis(params.n, cap)
    V = _monomial_powers(np.asarray(points, dtype=complex), b.exps)
    G = (V / hs2_weights(params.n, cap, params.s)) @ V.conj().T
    return 0.5 * (G + G.conj().T)


def _checked(G: np.ndarray, convention, params, check=True) -> GramMatrix:
    cond = float(np.linalg.cond(G)) if G.size else 1.0
    if check and not cond <= settings.cond_max:
        raise ToolkitError(ErrorKind.SingularGram, f"Gram condition number {cond:.3g} exceeds {settings.cond_max:.3g}")
    return GramMatrix(G, Convention(convention), params, cond)


def gram(seq: PointSeq, convention=Convention.Model, cap: int | None = None, truncated: bool = False,
         check: bool = True) -> GramMatrix:
    """Gram matrix of kernels at the points of ``seq``.

    Model uses the closed form unless ``truncated`` (then the degree-``cap`` Taylor
    polynomial of the kernel, matching what a truncated KernelFn evaluates to).
    Exact always uses the degree-``cap`` diagonal-weight kernel.
    """
    convention = Convention(convention)
    params = seq.params
    cap = settings.degree_cap if cap is None else int(cap)
    if convention is Convention.Model:
        G = model_gram_entries(seq.points, params.rho, cap if truncated else None)
    else:
        G = exact_gram_entries(seq.points, params, cap)
    return _checked(G, convention, params, check)


# pseudo-balls and Carleson boxes ------------------------------------------

@dataclasses.dataclass(frozen=True, eq=False)
class PseudoBall:
    """Q(zeta, h) = {z : |1 - <z, zeta>| < h} for a unit vector zeta."""

    zeta: np.ndarray
    h: float

    def __post_init__(self):
        z = np.asarray(self.zeta, dtype=complex)
        if abs(np.linalg.norm(z) - 1.0) > 1e-12:
            raise ToolkitError(ErrorKind.InvalidParams, "pseudo-ball center must lie on the sphere")
        if not 0 < self.h <= 2:
            raise ToolkitError(ErrorKind.InvalidParams, f"radius h = {self.h} outside (0, 2]")
        object.__setattr__(self, "zeta", z)

    def contains(self, points) -> np.ndarray:
        P = np.asarray(points, dtype=complex).reshape(-1, len(self.zeta))
        return np.abs(1.0 - P @ np.conj(self.zeta)) < self.h

    def to_dict(self) -> dict:
        return {"zeta_re": self.zeta.real.tolist(), "zeta_im": self.zeta.imag.tolist(), "h": self.h}


@dataclasses.dataclass
class CarlesonReport:
    sup_ratio: float
    argmax_box: PseudoBall | None
    boxes_tested: int
    exponent: float
    rows: list = dataclasses.field(default_factory=list, repr=False)
    warning: str = ""

    def to_dict(self) -> dict:
        return {
            "sup_ratio": self.sup_ratio,
            "argmax_box": None if self.argmax_box is None else self.argmax_box.to_dict(),
            "boxes_tested": self.boxes_tested,
            "exponent": self.exponent,
            "one_point_convention": "h = c(1-|a|^2), c in {1,2,4,8}",
            "warning": self.warning,
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["center", "h", "mass", "ratio"])
        for zeta, h, mass, ratio in self.rows:
            w.writerow([_fmt_point(zeta), repr(float(h)), repr(float(mass)), repr(float(ratio))])
        return buf.getvalue()


def _fmt_point(z) -> str:
    return ";".join(f"{float(c.real)!r}{float(c.imag):+}j" for c in np.asarray(z, dtype=complex))


def boundary_grid(n: int, count: int, seed: int) -> np.ndarray:
    """Box centers: roots of unity when n = 1, else coordinate axes plus seeded sphere points."""
    if n == 1:
        return np.exp(2j * np.pi * np.arange(count) / count).reshape(-1, 1)
    from .norms import sphere_samples

    axes = np.eye(n, dtype=complex)
    return np.vstack([axes, sphere_samples(n, max(count - n, 0), seed, chunk=max(count, 1))])


def carleson_box_sup(seq: PointSeq, params: SpaceParams | None = None, strategy: str = "standard",
                     grid_count: int = 16, dyadic_levels: int = 3, seed: int | None = None) -> CarlesonReport:
    """Largest nu_S(Q)/h^{n-sp} over a witness family of pseudo-balls.

    nu_S puts mass (1-|a|^2)^{n-sp} at each a. The family: boxes centered at
    a/|a| with h = c(1-|a|^2), c in {1, 2, 4, 8}, plus boundary-grid centers at
    h = 2^-1 .. 2^-dyadic_levels. The result is a lower bound for the true sup.
    """
    params = params or seq.params
    seed = settings.seed if seed is None else seed
    e = params.n - params.s * params.p
    note = ""
    if e <= 0:
        note = f"exponent n - sp = {e} <= 0: box condition degenerates"
        warnings.warn(note, stacklevel=2)
    pts = seq.points
    mass = (1.0 - seq.norms_sq) ** e
    boxes = []
    for a, r2 in zip(pts, seq.norms_sq):
        r = math.sqrt(r2)
        zeta = a / r if r > 0 else np.eye(params.n, dtype=complex)[0]
        for c in (1, 2, 4, 8):
            h = min(c * (1.0 - r2), 2.0)
            boxes.append((zeta, h))
    if strategy in ("standard", "dyadic"):
        levels = dyadic_levels if strategy == "standard" else max(dyadic_levels, 10)
        for zeta in boundary_grid(params.n, grid_count, seed):
            for k in range(1, levels + 1):
                boxes.append((zeta, 2.0 ** -k))
    elif strategy != "points":
        raise ToolkitError(ErrorKind.InvalidParams, f"unknown box strategy {strategy!r}")
    best, arg, rows = 0.0, None, []
    for zeta, h in boxes:
        inside = np.abs(1.0 - pts @ np.conj(zeta)) < h if len(pts) else np.zeros(0, bool)
        m = float(np.sum(mass[inside]))
        ratio = m / h ** e
        rows.append((zeta, h, m, ratio))
        if ratio > best:
            best, arg = ratio, (zeta, h)
    box = PseudoBall(arg[0], arg[1]) if arg is not None else None
    return CarlesonReport(best, box, len(boxes), e, rows, note)


# separation and frame bounds ----------------------------------------------

def pseudo_hyperbolic(a, b) -> float:
    """|phi_a(b)| from 1 - |phi_a(b)|^2 = (1-|a|^2)(1-|b|^2)/|1-<b,a>|^2."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    ra = 1.0 - float(np.vdot(a, a).real)
    rb = 1.0 - float(np.vdot(b, b).real)
    d = abs(1.0 - inner(b, a)) ** 2
    return math.sqrt(max(0.0, 1.0 - ra * rb / d))


def separation_stats(seq: PointSeq) -> dict:
    N = len(seq)
    if N < 2:
        raise ToolkitError(ErrorKind.InvalidParams, "separation needs at least two points")
    D = np.zeros((N, N))
    for i in range(N):
        for j in range(i + 1, N):
            D[i, j] = D[j, i] = pseudo_hyperbolic(seq[i], seq[j])
    off = D[~np.eye(N, dtype=bool)]
    return {"min_pseudo_hyperbolic": float(off.min()), "pair_matrix": D}


def normalized_gram(seq: PointSeq) -> np.ndarray:
    G = model_gram_entries(seq.points, seq.params.rho)
    d = np.sqrt(np.real(np.diag(G)))
    return G / np.outer(d, d)


def riesz_bounds(seq: PointSeq, params: SpaceParams | None = None) -> dict:
    """Extreme eigenvalues of the normalized-kernel Gram matrix (p = 2 only)."""
    params = params or seq.params
    if params.p != 2:
        raise ToolkitError(ErrorKind.InvalidParams, "Riesz bounds are defined for p = 2")
    E = normalized_gram(PointSeq(params, seq.points, seq.labels))
    _checked(E, Convention.Model, params)
    ev = np.linalg.eigvalsh(E)
    lower, upper = float(ev[0]), float(ev[-1])
    return {"lower": lower, "upper": upper, "A2": max(upper, 1.0 / lower) if lower > 0 else math.inf}
