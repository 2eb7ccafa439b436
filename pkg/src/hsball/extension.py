"""Interpolation operators built from a dual system: extension, gluing, weighted
interpolation, plus Rademacher type experiments and dual-boundedness tests.
"""

from __future__ import annotations

import dataclasses
import itertools
import math
import warnings

import numpy as np

from .config import settings
from .drury import DrurySystem
from .errors import ErrorKind, ToolkitError
from .kernels import Convention, kernel, model_tail_degree, proxies
from .multipliers import interpolate
from .norms import QuadMode, QuadratureSpec, hs2_weights, hsp_norm, sphere_samples
from .params import PointSeq, SpaceParams
from .polyfn import PolyFn, bracket_shift, mul


def _degree_budget(n: int, monomials: int = 100_000, hard: int = 4000) -> int:
    D = 0
    while D < hard and math.comb(n + D + 1, n) <= monomials:
        D += 1
    return D


def kernel_degree(seq: PointSeq, tol: float = 1e-14, floor: int = 0) -> int:
    """Truncation degree that makes every model kernel accurate to ``tol`` at its own center.

    Points very close to the sphere may need more degrees than the monomial budget
    allows; then the budget is used and a warning is issued (DegreeOverflow if strict).
    """
    rho = seq.params.rho
    r2 = float(np.max(seq.norms_sq)) if len(seq) else 0.0
    limit = _degree_budget(seq.params.n)
    D = model_tail_degree(r2, rho, tol, limit)
    if D == limit and r2 > 0:
        full = (1.0 - r2) ** (-rho)
        acc, term = 1.0, 1.0
        for k in range(1, D + 1):
            term *= (rho + k - 1) / k * r2
            acc += term
        tail = (full - acc) / full
        if tail > tol:
            msg = f"kernel truncated at degree {D}: relative tail {tail:.2e} at |a|^2 = {r2:.6f}"
            if settings.strict:
                raise ToolkitError(ErrorKind.DegreeOverflow, msg)
            warnings.warn(msg, RuntimeWarning, stacklevel=2)
    return max(floor, D)


# extension --------------------------------------------------------------------

@dataclasses.dataclass
class ExtensionReport:
    f: PolyFn
    targets: np.ndarray
    value_residuals: np.ndarray
    norm_ratio: float
    l: int
    norm_stderr: float = 0.0

    def to_dict(self) -> dict:
        return {
            "l": self.l,
            "max_value_residual": float(np.max(self.value_residuals, initial=0.0)),
            "value_residuals": self.value_residuals.tolist(),
            "norm_ratio": self.norm_ratio,
            "norm_stderr": self.norm_stderr,
            "truncated": self.f.truncated,
            "degree": self.f.degree,
        }


def default_power(params: SpaceParams) -> int:
    return int(math.floor(params.s)) + 1


def extension_basis(sys: DrurySystem, l: int, kdeg: int | None = None) -> list:
    """The functions gamma_a^l e_a, with e_a = k_a / ||k_a||_{H_s^p} (proxy)."""
    key = ("ext", l, kdeg)
    if key in sys.Q:
        return sys.Q[key]
    params = sys.params
    kdeg = kernel_degree(sys.seq) if kdeg is None else kdeg
    cap = sys.working_cap(l, kdeg)
    prox = proxies(sys.seq, params.p)
    out = []
    for a in range(1, sys.N + 1):
        e = kernel(sys.seq[a - 1], params, Convention.Model, kdeg).poly.with_cap(cap) / prox[a - 1]
        out.append(mul(sys.gamma_power(a, l, cap), e, strict=True, cap=cap))
    sys.Q[key] = out
    return out


def extend_sequence(sys: DrurySystem, lam, l: int | None = None, params: SpaceParams | None = None,
                quad: QuadratureSpec | None = None, kdeg: int | None = None) -> ExtensionReport:
    """f = sum_a lambda_a gamma_a^l e_a, so that f(a) = lambda_a ||k_a||_{H_s^p'} (proxy)."""
    params = params or sys.params
    l = default_power(params) if l is None else int(l)
    lam = np.asarray(lam, dtype=complex).reshape(-1)
    if len(lam) != sys.N:
        raise ToolkitError(ErrorKind.InvalidParams, f"{len(lam)} values for {sys.N} points")
    basis_fns = extension_basis(sys, l, kdeg)
    coeffs = np.tensordot(lam, np.array([g.coeffs for g in basis_fns]), axes=1)
    f = basis_fns[0]._like(coeffs, any(g.truncated for g in basis_fns))
    targets = lam * proxies(sys.seq, params.p_prime)
    res = np.abs(f(sys.seq.points) - targets)
    lp = float(np.sum(np.abs(lam) ** params.p) ** (1.0 / params.p))
    if lp == 0:
        return ExtensionReport(f, targets, res, 0.0, l)
    rep = hsp_norm(f, params, quad)
    return ExtensionReport(f, targets, res, rep.value / lp, l, rep.stderr / lp)


# gluing -----------------------------------------------------------------------

def glue_union(sys1: DrurySystem, sys2: DrurySystem, witnesses: dict, l: int = 1) -> PolyFn:
    """m = sum_b Gamma_b^l (1 - m_b), m_b = sum_a gamma_a^l m_{a,b}.

    ``witnesses[(i, k)]`` is a polynomial equal to 1 at the i-th point of S1 and
    0 at the k-th point of S2 (0-based). m vanishes on S1 and equals 1 on S2.
    """
    n = sys1.params.n
    if sys2 is None or sys2.N == 0:
        return PolyFn.zero(n, sys1.cap)
    wdeg = max((w.degree for w in witnesses.values()), default=0)
    cap = sys1.cap * l + sys2.cap * l + max(wdeg, 0)
    m = PolyFn.zero(n, cap)
    for k in range(sys2.N):
        mb = PolyFn.zero(n, cap)
        for i in range(sys1.N):
            mb = mb + mul(sys1.gamma_power(i + 1, l, cap), witnesses[(i, k)].with_cap(cap), strict=True, cap=cap)
        m = m + mul(sys2.gamma_power(k + 1, l, cap), 1.0 - mb, strict=True, cap=cap)
    return m


def glue_witnesses(seq1: PointSeq, seq2: PointSeq, params: SpaceParams, cap: int | None = None) -> dict:
    """Two-point witnesses m_{a,b} (1 at a, 0 at b) from minimal-norm interpolation."""
    out = {}
    for i, a in enumerate(seq1.points):
        for k, b in enumerate(seq2.points):
            pair = PointSeq.from_points(params, [a, b])
            out[(i, k)] = interpolate(pair, [1.0, 0.0], Convention.Model, cap, shortcut=False).poly
    return out


def interpolant_from_dual(sys: DrurySystem, lam, l: int = 1) -> PolyFn:
    """sum_a lambda_a gamma_a^l, which takes the value lambda_a at a."""
    cap = sys.working_cap(l)
    out = PolyFn.zero(sys.params.n, cap)
    for a, v in enumerate(np.asarray(lam, dtype=complex).reshape(-1)):
        out = out + v * sys.gamma_power(a + 1, l, cap)
    return out


def assemble(m: PolyFn, m1: PolyFn, m2: PolyFn) -> PolyFn:
    """M = (1 - m) m_1 + m m_2."""
    cap = m.cap + max(m1.cap, m2.cap)
    mm = m.with_cap(cap)
    return mul(1.0 - mm, m1.with_cap(cap), strict=True) + mul(mm, m2.with_cap(cap), strict=True)


@dataclasses.dataclass
class GlueReport:
    m: PolyFn
    M: PolyFn
    m_residual: float
    M_residual: float
    witness_residual: float

    def to_dict(self) -> dict:
        return {
            "m_residual": self.m_residual,
            "M_residual": self.M_residual,
            "witness_residual": self.witness_residual,
            "degree_m": self.m.degree,
            "degree_M": self.M.degree,
            "domination_checked": "constructed witnesses only",
        }


def glue_and_assemble(sys1: DrurySystem, sys2: DrurySystem, lam1, lam2, l: int = 1,
                      witnesses: dict | None = None) -> GlueReport:
    params = sys1.params
    lam1 = np.asarray(lam1, dtype=complex).reshape(-1)
    lam2 = np.asarray(lam2, dtype=complex).reshape(-1)
    m1 = interpolant_from_dual(sys1, lam1, l)
    if sys2 is None or sys2.N == 0:
        m = PolyFn.zero(params.n, m1.cap)
        M = m1
        return GlueReport(m, M, 0.0, float(np.max(np.abs(M(sys1.seq.points) - lam1))), 0.0)
    if witnesses is None:
        witnesses = glue_witnesses(sys1.seq, sys2.seq, params, sys1.cap)
    wres = 0.0
    for (i, k), w in witnesses.items():
        wres = max(wres, abs(w(sys1.seq[i]) - 1.0), abs(w(sys2.seq[k])))
    m = glue_union(sys1, sys2, witnesses, l)
    m2 = interpolant_from_dual(sys2, lam2, l)
    M = assemble(m, m1, m2)
    mres = max(float(np.max(np.abs(m(sys1.seq.points)))), float(np.max(np.abs(m(sys2.seq.points) - 1.0))))
    Mres = max(float(np.max(np.abs(M(sys1.seq.points) - lam1))), float(np.max(np.abs(M(sys2.seq.points) - lam2))))
    return GlueReport(m, M, mres, Mres, wres)


# weighted interpolation -------------------------------------------------------

@dataclasses.dataclass
class WeightedReport:
    h: PolyFn
    targets: np.ndarray
    value_residuals: np.ndarray
    gamma: np.ndarray
    split: dict
    norm_ratio: float | None = None

    def to_dict(self) -> dict:
        return {
            "max_value_residual": float(np.max(self.value_residuals, initial=0.0)),
            "max_gamma_deviation": float(np.max(np.abs(self.gamma - 1.0), initial=0.0)),
            "split": self.split,
            "norm_ratio": self.norm_ratio,
        }


def split_sequence(lam, p: float, q: float, r: float) -> dict:
    """lambda = mu nu with mu = lambda/|lambda|^alpha, nu = |lambda|^alpha, alpha = r/q.

    Then ||mu||_p^p = ||nu||_q^q = ||lambda||_r^r.
    """
    lam = np.asarray(lam, dtype=complex).reshape(-1)
    alpha = r / q
    absl = np.abs(lam)
    safe = np.where(absl > 0, absl, 1.0)
    mu = np.where(absl > 0, lam / safe ** alpha, 0.0)
    nu = absl ** alpha
    return {
        "alpha": alpha,
        "mu": mu,
        "nu": nu,
        "mu_p_p": float(np.sum(np.abs(mu) ** p)),
        "nu_q_q": float(np.sum(nu ** q)),
        "lam_r_r": float(np.sum(absl ** r)),
    }


def dual_from_drury(sys: DrurySystem) -> list:
    """rho_a = ||k_a||_{H_s^p'} gamma_a, so rho_a(b) = delta_ab times the proxy."""
    prox = proxies(sys.seq, sys.params.p_prime)
    return [g * prox[i] for i, g in enumerate(sys.gamma)]


def weighted_interp(seq: PointSeq, dual: list, lam, q: float, r: float, params: SpaceParams | None = None,
                    kdeg: int | None = None, quad: QuadratureSpec | None = None,
                    with_norm: bool = False) -> WeightedReport:
    """h = sum_a lambda_a rho_a (1-|a|^2)^s k_a / (||k_a||_{p'} ||k_a||_r).

    Targets h(a) = lambda_a (1-|a|^2)^s ||k_a||_{H_s^r'}. All kernel norms are the
    proxies (1-|a|^2)^{s-n/t'}.
    """
    params = params or seq.params
    p = params.p
    if not math.isclose(1.0 / r, 1.0 / p + 1.0 / q, rel_tol=0, abs_tol=1e-12):
        raise ToolkitError(ErrorKind.InvalidParams, f"1/r = {1 / r} != 1/p + 1/q = {1 / p + 1 / q}")
    lam = np.asarray(lam, dtype=complex).reshape(-1)
    pr = params.replace(p=r)
    w = (1.0 - seq.norms_sq) ** params.s
    prox_pp = proxies(seq, p / (p - 1.0) if p > 1 else math.inf)
    prox_r = (1.0 - seq.norms_sq) ** params.kernel_exp(r)
    prox_rp = (1.0 - seq.norms_sq) ** params.kernel_exp(pr.p_prime)
    prox_q = (1.0 - seq.norms_sq) ** params.kernel_exp(q)
    gamma = w * prox_q / (prox_pp * prox_r)
    kdeg = kernel_degree(seq) if kdeg is None else kdeg
    ddeg = max(max(g.degree for g in dual), 0) if dual else 0
    cap = ddeg + kdeg
    h = PolyFn.zero(params.n, cap)
    for i, a in enumerate(seq.points):
        k = kernel(a, params, Convention.Model, kdeg).poly.with_cap(cap)
        h = h + (lam[i] * w[i] / (prox_pp[i] * prox_r[i])) * mul(dual[i].with_cap(cap), k, strict=True)
    targets = lam * w * prox_rp
    res = np.abs(h(seq.points) - targets)
    sp = split_sequence(lam, p, q, r)
    ratio = None
    if with_norm and np.any(lam != 0):
        denom = sp["nu_q_q"] ** (1 / q) * sp["mu_p_p"] ** (1 / p)
        ratio = hsp_norm(h, pr, quad).value / denom
    split = {k: v for k, v in sp.items() if k not in ("mu", "nu")}
    return WeightedReport(h, targets, res, gamma, split, ratio)


# Rademacher experiments -------------------------------------------------------

def sign_patterns(N: int, draws: int | None = None, seed: int | None = None) -> np.ndarray:
    """All 2^N patterns when N <= 12, else ``draws`` seeded rows (row i from stream i)."""
    if N <= 12:
        return np.array(list(itertools.product([1.0, -1.0], repeat=N))).reshape(-1, N)
    seed = settings.seed if seed is None else seed
    draws = draws or 4096
    streams = np.random.SeedSequence(seed).spawn(draws)
    return np.array([np.random.default_rng(s).choice([1.0, -1.0], N) for s in streams])


@dataclasses.dataclass
class RademacherDraw:
    seed: int
    signs: dict
    draw_count: int


def rademacher_draw(labels, seed: int, index: int) -> RademacherDraw:
    """Signs as a deterministic function of (seed, draw index, label)."""
    out = {}
    for lab in labels:
        h = int.from_bytes(str(lab).encode(), "little") % (2 ** 63)
        g = np.random.default_rng(np.random.SeedSequence([seed, index, h]))
        out[lab] = 1 if g.random() < 0.5 else -1
    return RademacherDraw(seed, out, index + 1)


def _pattern_powers(family, params: SpaceParams, quad: QuadratureSpec | None, eps: np.ndarray):
    """E_p[eps] = ||sum eps_j f_j||_{H_s^p}^p for each sign row; plus each ||f_j||^p."""
    p = params.p
    shifted = [bracket_shift(f, params.s) for f in family]
    cap = max(f.cap for f in shifted)
    shifted = [f.with_cap(cap) for f in shifted]
    n = family[0].n
    if p == 2 and (quad is None or quad.mode is QuadMode.ExactMoments):
        W = hs2_weights(n, cap, 0.0)
        C = np.array([f.coeffs for f in shifted])
        G = (C * W) @ C.conj().T
        vals = np.real(np.einsum("ri,ij,rj->r", eps, G, eps))
        single = np.real(np.diag(G))
        return vals, single, QuadMode.ExactMoments.value
    quad = quad or QuadratureSpec.monte_carlo()
    Z = sphere_samples(n, quad.sample_count, quad.seed)
    V = np.array([f(Z) for f in shifted])
    vals = np.array([np.mean(np.abs(e @ V) ** p) for e in eps])
    single = np.mean(np.abs(V) ** p, axis=1)
    return vals, single, QuadMode.MonteCarlo.value


def rademacher_experiment(family, params: SpaceParams, draws: int | None = None, seed: int | None = None,
                          quad: QuadratureSpec | None = None) -> dict:
    """Empirical type constant and the convexity inequality for signed sums.

    lhs = (E ||sum eps_j f_j||^2)^{1/2}, rhs = (sum ||f_j||^p)^{1/p}. The fixed-sign
    check uses f(eps) = f_1 + sum_{j>=2} eps_j f_j, whose expectation is f_1:
    ||f_1||^p <= E ||f(eps)||^p, and also pattern by pattern against -eps.
    Norms are computed on one fixed sample set (or exactly), so convexity holds
    for the empirical measure too.
    """
    N = len(family)
    if N == 0:
        raise ToolkitError(ErrorKind.InvalidParams, "empty family")
    p = params.p
    eps = sign_patterns(N, draws, seed)
    vals_p, single_p, mode = _pattern_powers(family, params, quad, eps)
    norms = vals_p ** (1.0 / p)
    lhs = float(math.sqrt(np.mean(norms ** 2)))
    rhs = float(np.sum(single_p) ** (1.0 / p))
    # fix eps_1 = +1
    eps1 = eps[eps[:, 0] > 0]
    f1_p = float(single_p[0])
    e_p = vals_p[eps[:, 0] > 0]
    mean_p = float(np.mean(e_p))
    if N > 1:
        flipped = np.hstack([eps1[:, :1], -eps1[:, 1:]])
        fl_p, _, _ = _pattern_powers(family, params, quad, flipped)
        pair_ok = bool(np.all(f1_p <= 0.5 * (e_p + fl_p) * (1 + 1e-12) + 1e-300))
    else:
        pair_ok = True
    return {
        "N": N,
        "patterns": int(len(eps)),
        "enumerated": N <= 12,
        "mode": mode,
        "lhs": lhs,
        "rhs": rhs,
        "ratio": lhs / rhs if rhs > 0 else math.nan,
        "first_sign_fixed": {"lhs": f1_p, "rhs": mean_p, "pass": f1_p <= mean_p * 1.02, "pairwise_pass": pair_ok},
    }


# dual boundedness -------------------------------------------------------------

def dual_bounded_test(seq: PointSeq, params: SpaceParams | None = None, cap: int | None = None,
                      quad: QuadratureSpec | None = None, threshold: float | None = None) -> dict:
    """rho_a = minimal-norm interpolant of delta_ab ||k_a||_{H_s^p'}; report max ||rho_a||_{H_s^p}."""
    params = params or seq.params
    prox = proxies(PointSeq(params, seq.points, seq.labels), params.p_prime)
    per = []
    for i in range(len(seq)):
        v = np.zeros(len(seq), dtype=complex)
        v[i] = prox[i]
        rho = interpolate(PointSeq(params, seq.points, seq.labels), v, Convention.Model, cap).poly
        per.append(hsp_norm(rho, params, quad).value)
    mx = max(per) if per else 0.0
    out = {"max_dual_norm": mx, "per_point": per, "proxies": prox.tolist()}
    if threshold is not None:
        out["dual_bounded"] = mx <= threshold
    return out
