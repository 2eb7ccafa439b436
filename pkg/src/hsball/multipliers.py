"""Multiplier norms, minimal-norm kernel interpolation and Pick-matrix bisection."""

from __future__ import annotations

import dataclasses
import json
import math

import numpy as np

from .config import settings
from .errors import ErrorKind, ToolkitError
from .kernels import Convention, gram, kernel
from .norms import QuadratureSpec, hs2_weights, sphere_samples
from .params import PointSeq, SpaceParams, as_point
from .polyfn import PolyFn, basis, bracket_shift, mul


# minimal-norm interpolation -----------------------------------------------

@dataclasses.dataclass
class Interpolant:
    poly: PolyFn
    weights: np.ndarray
    norm_sq: float
    path: str

    def to_dict(self) -> dict:
        return {
            "path": self.path,
            "norm_sq": self.norm_sq,
            "weights_re": self.weights.real.tolist(),
            "weights_im": self.weights.imag.tolist(),
            "poly": self.poly.to_dict(),
        }


def kernel_solve(seq: PointSeq, values, convention=Convention.Model, cap: int | None = None,
                 truncated: bool = False):
    """Solve G c = v; returns (c, v* G^-1 v)."""
    v = np.asarray(values, dtype=complex).reshape(-1)
    G = gram(seq, convention, cap, truncated=truncated).entries
    c = np.linalg.solve(G, v)
    return c, float(np.real(np.vdot(v, c)))


def interpolate(seq: PointSeq, values, convention=Convention.Model, cap: int | None = None,
                shortcut: bool = True) -> Interpolant:
    """Minimal-norm g = sum c_j k_{a_j} with g(a_i) = values_i.

    Kernels are the truncated polynomials, and the Gram matrix is the one of the
    truncated kernels, so the interpolation conditions hold to rounding error.
    With ``shortcut``, constant data gives the constant function.
    """
    convention = Convention(convention)
    cap = settings.degree_cap if cap is None else int(cap)
    v = np.asarray(values, dtype=complex).reshape(-1)
    n = seq.params.n
    if len(v) != len(seq):
        raise ToolkitError(ErrorKind.InvalidParams, f"{len(v)} values for {len(seq)} points")
    if shortcut and len(v) and np.allclose(v, v[0], rtol=0, atol=1e-14):
        return Interpolant(PolyFn.const(v[0], n, cap), np.zeros(len(v), complex), abs(v[0]) ** 2, "constant")
    c, nsq = kernel_solve(seq, v, convention, cap, truncated=True)
    coeffs = np.zeros(basis(n, cap).size, dtype=complex)
    for cj, a in zip(c, seq.points):
        coeffs += cj * kernel(a, seq.params, convention, cap).poly.coeffs
    return Interpolant(PolyFn(n, cap, coeffs), c, nsq, f"kernel-span/{convention.value}")


def min_norm_interpolant(seq: PointSeq, values, convention=Convention.Model, cap: int | None = None) -> PolyFn:
    return interpolate(seq, values, convention, cap, shortcut=False).poly


# Galerkin multiplier norm -------------------------------------------------

def multiplication_matrix(m: PolyFn, cap: int) -> np.ndarray:
    """Coefficient matrix of f -> P_cap(m f) on the monomials of degree <= cap."""
    b = basis(m.n, cap)
    mm = m.with_cap(cap)
    M = np.zeros((b.size, b.size), dtype=complex)
    for g in np.flatnonzero(mm.coeffs):
        dg = b.degs[g]
        src = np.flatnonzero(b.degs <= cap - dg)
        # keys add without carry because every coordinate stays <= cap
        dst = b.lookup[b.keys[src] + b.keys[g]]
        M[dst, src] += mm.coeffs[g]
    return M


def galerkin_operator(m: PolyFn, s: float, cap: int) -> np.ndarray:
    """P_cap M_m P_cap in the orthonormal basis z^alpha / sqrt(W_alpha) of H_s^2."""
    sw = np.sqrt(hs2_weights(m.n, cap, s))
    return sw[:, None] * multiplication_matrix(m, cap) / sw[None, :]


def galerkin_norm(m: PolyFn, s: float, cap: int) -> float:
    return float(np.linalg.norm(galerkin_operator(m, s, cap), 2))


@dataclasses.dataclass
class MultiplierEstimate:
    galerkin_upper: float
    sampling_lower: float
    degree_cap: int
    sup_norm: float = 0.0
    family_size: int = 0

    @property
    def value(self) -> float:
        return max(self.galerkin_upper, self.sampling_lower, self.sup_norm)

    def to_dict(self) -> dict:
        return {
            "galerkin_upper": self.galerkin_upper,
            "sampling_lower": self.sampling_lower,
            "sup_norm": self.sup_norm,
            "degree_cap": self.degree_cap,
            "family_size": self.family_size,
        }


def boundary_sup(m: PolyFn, samples: int = 20000, seed: int | None = None, refine: int = 4) -> float:
    """max |m| on the sphere, by sampling plus local refinement of the best samples.

    By the maximum principle this is sup |m| over the ball, a lower bound for any
    multiplier norm.
    """
    from scipy.optimize import minimize

    seed = settings.seed if seed is None else seed
    n = m.n
    if m.degree <= 0:
        return abs(m.coeff((0,) * n))
    if n == 1:
        Z = np.exp(2j * np.pi * np.arange(samples) / samples).reshape(-1, 1)
    else:
        Z = sphere_samples(n, samples, seed)
    vals = np.abs(m(Z))
    best = float(vals.max())
    order = np.argsort(vals)[::-1][:refine]
    if n == 1:
        from scipy.optimize import minimize_scalar

        step = 2 * np.pi / samples
        for i in order:
            t0 = 2 * np.pi * i / samples
            res = minimize_scalar(lambda t: -abs(m(np.array([np.exp(1j * t)]))),
                                  bounds=(t0 - step, t0 + step), method="bounded", options={"xatol": 1e-12})
            best = max(best, -float(res.fun))
        return best

    def neg(x):
        z = x[:n] + 1j * x[n:]
        z = z / np.linalg.norm(z)
        return -abs(m(z))

    for i in order:
        z0 = Z[i]
        res = minimize(neg, np.r_[z0.real, z0.imag], method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-13, "maxiter": 800})
        best = max(best, -float(res.fun))
    return best


def multiplier_norm_estimate(m: PolyFn, params: SpaceParams, cap: int | None = None,
                             seq: PointSeq | None = None, quad: QuadratureSpec | None = None,
                             random_count: int = 20, seed: int | None = None, strict: bool | None = None,
                             with_sup: bool = False) -> MultiplierEstimate:
    """Galerkin and sampling estimates of the multiplier norm of m.

    galerkin_upper is the norm of P_D M_m P_D on H_s^2. Despite its name it is a
    lower bound for the true operator norm (the projection can only shrink it).
    sampling_lower is max ||m f|| / ||f|| over monomials, seeded random
    polynomials and truncated kernels at ``seq``, all of degree <= D - deg m, so
    at p = 2 it never exceeds galerkin_upper.
    """
    cap = settings.degree_cap if cap is None else int(cap)
    strict = settings.strict if strict is None else strict
    dm = max(m.degree, 0)
    if dm > cap:
        if strict:
            raise ToolkitError(ErrorKind.DegreeOverflow, f"multiplier degree {dm} exceeds cap {cap}")
    gal = galerkin_norm(m, params.s, cap)
    fdeg = max(cap - dm, 0)
    family = []
    b = basis(m.n, fdeg)
    for i in range(b.size):
        c = np.zeros(b.size, dtype=complex)
        c[i] = 1.0
        family.append(PolyFn(m.n, fdeg, c))
    rng = np.random.default_rng(settings.seed if seed is None else seed)
    for _ in range(random_count):
        family.append(PolyFn.random(m.n, fdeg, rng, cap=fdeg))
    if seq is not None:
        for a in seq.points:
            family.append(kernel(a, params, Convention.Model, fdeg).poly)
    mc = m.with_cap(cap)
    best = 0.0
    exact2 = params.p == 2 and (quad is None or quad.mode.value == "ExactMoments")
    W = hs2_weights(m.n, cap, params.s)
    if not exact2:
        # one shared sample set, so the ratios are exact for its empirical measure
        count = quad.sample_count if quad is not None else 20000
        Z = sphere_samples(m.n, count, settings.seed if quad is None else quad.seed)
    for f in family:
        f = f.with_cap(cap)
        g = mul(mc, f, strict=False)
        if exact2:
            num = float(np.sum(W * np.abs(g.coeffs) ** 2))
            den = float(np.sum(W * np.abs(f.coeffs) ** 2))
            r = math.sqrt(num / den) if den > 0 else 0.0
        else:
            p = params.p
            den = np.mean(np.abs(bracket_shift(f, params.s)(Z)) ** p) ** (1 / p)
            num = np.mean(np.abs(bracket_shift(g, params.s)(Z)) ** p) ** (1 / p)
            r = float(num / den) if den > 0 else 0.0
        best = max(best, r)
    sup = boundary_sup(m) if with_sup else 0.0
    return MultiplierEstimate(gal, best, cap, sup, len(family))


def adjoint_eigen_residual(m: PolyFn, a, params: SpaceParams, cap: int | None = None) -> float:
    """||M_m^* k_a - conj(m(a)) k_a|| / ||k_a|| in the degree-D Galerkin model of H_s^2."""
    cap = settings.degree_cap if cap is None else int(cap)
    a = as_point(a, params.n)
    W = hs2_weights(params.n, cap, params.s)
    k = kernel(a, params, Convention.Exact, cap).poly.coeffs
    M = multiplication_matrix(m, cap)
    # adjoint w.r.t. the diagonal inner product sum W x conj(y)
    adj = (M.conj().T @ (W * k)) / W
    r = adj - np.conj(m(a)) * k
    return float(math.sqrt(np.sum(W * np.abs(r) ** 2) / np.sum(W * np.abs(k) ** 2)))


# Pick bisection -----------------------------------------------------------

@dataclasses.dataclass
class PickResult:
    t_min: float
    certificate: float
    trace: list
    iterations: int

    def to_dict(self) -> dict:
        return {
            "t_min": self.t_min,
            "certificate": self.certificate,
            "iterations": self.iterations,
            "trace": [{"t": t, "feasible": f, "min_eig": e} for t, f, e in self.trace],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def pick_matrix(K: np.ndarray, values: np.ndarray, t: float) -> np.ndarray:
    lam = np.asarray(values, dtype=complex)
    return (t * t - np.outer(lam, np.conj(lam))) * K


def _psd(P: np.ndarray):
    ev = float(np.linalg.eigvalsh(0.5 * (P + P.conj().T))[0])
    scale = float(np.max(np.abs(P))) if P.size else 0.0
    return ev >= -settings.psd_tol * scale, ev


def pick_min_norm(seq: PointSeq, values, params: SpaceParams | None = None, max_iter: int = 200,
                  rel_width: float = 1e-10) -> PickResult:
    """Smallest t with [(t^2 - l_i conj(l_j)) K(a_i, a_j)] positive semidefinite.

    Valid in the complete Pick regime rho = n - 2s <= 1 with p = 2.
    """
    params = params or seq.params
    if params.p != 2:
        raise ToolkitError(ErrorKind.InvalidParams, "Pick bisection needs p = 2")
    if params.rho > 1 + 1e-12:
        raise ToolkitError(ErrorKind.InvalidParams, f"rho = {params.rho} > 1: kernel is not complete Pick")
    lam = np.asarray(values, dtype=complex).reshape(-1)
    K = gram(seq, Convention.Model).entries
    lo = float(np.max(np.abs(lam))) if len(lam) else 0.0
    trace = []

    def test(t):
        ok, ev = _psd(pick_matrix(K, lam, t))
        trace.append((t, bool(ok), ev))
        return ok, ev

    if lo == 0.0:
        return PickResult(0.0, 0.0, trace, 0)
    ok, ev = test(lo)
    if ok:
        return PickResult(lo, ev, trace, 1)
    N = len(lam)
    hi = lo * math.sqrt(float(np.linalg.cond(K))) * N
    it = 1
    while True:
        it += 1
        ok, ev_hi = test(hi)
        if ok:
            break
        lo, hi = hi, 2 * hi
        if it > max_iter:
            raise ToolkitError(ErrorKind.BisectionNoConverge, "no feasible upper bracket found")
    while hi - lo > rel_width * max(1.0, hi):
        it += 1
        if it > max_iter:
            raise ToolkitError(ErrorKind.BisectionNoConverge, f"bracket width {hi - lo} after {max_iter} steps")
        mid = 0.5 * (lo + hi)
        ok, ev = test(mid)
        if ok:
            hi, ev_hi = mid, ev
        else:
            lo = mid
    return PickResult(hi, ev_hi, trace, it)


def two_point_witness(a, b, params: SpaceParams, cap: int | None = None) -> tuple[PolyFn, float | None]:
    """A polynomial equal to 1 at a and 0 at b, plus the Pick value when certified.

    The function itself is the minimal-norm kernel-span interpolant; the Pick
    bisection (rho <= 1, p = 2) gives the optimal multiplier norm for reference.
    """
    seq = PointSeq.from_points(params, [a, b])
    g = interpolate(seq, [1.0, 0.0], Convention.Model, cap, shortcut=False).poly
    t = None
    if params.p == 2 and params.rho <= 1 + 1e-12:
        t = pick_min_norm(seq, [1.0, 0.0], params).t_min
    return g, t
