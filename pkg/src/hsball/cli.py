"""Command-line front end.

    hsball COMMAND --config run.json [--out DIR|-] [--seed N] [--strict] [--samples N]

Exit status: 0 when every check in scope passed, 2 when a check failed, 1 on a
toolkit error (reported as JSON on stderr).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import settings
from .errors import ErrorKind, ToolkitError
from .params import PointSeq, SpaceParams

COMMANDS = (
    "norms", "kernel-gram", "carleson", "separation", "pick", "drury", "extend", "glue",
    "weighted", "automorphism", "type-exp", "appendix", "all-checks",
)

DEFAULTS = {
    "override_sp_bound": False,
    "degree_cap": 12,
    "mc_samples": 200_000,
    "seed": 42,
    "strict": False,
    "quadrature": "ExactMoments",
    "box_strategy": "standard",
    "z_samples": 1000,
    "trials": 50,
    "jmax": 3,
    "lmax": 4,
    "degree": 4,
    "family_size": 6,
}

OPTIONAL = {"points", "generator", "labels", "values", "lambda", "l", "j", "points2", "generator2",
            "lambda2", "q", "mu"}
REQUIRED = {"n", "s"}
KNOWN = REQUIRED | {"p"} | set(DEFAULTS) | OPTIONAL
GENERATOR_KEYS = {"kind", "count", "seed", "max_radius"}


class CheckFailed(Exception):
    pass


# config -----------------------------------------------------------------------

def _bad(path, msg):
    return ToolkitError(ErrorKind.InvalidParams, f"{path}: {msg}")


def parse_point(raw, n: int, path: str) -> np.ndarray:
    """A point is 2n reals (re, im interleaved), n [re, im] pairs, or n reals."""
    if not isinstance(raw, list):
        raise _bad(path, "a point must be a JSON array")
    if all(isinstance(x, list) for x in raw) and len(raw) == n:
        if any(len(x) != 2 for x in raw):
            raise _bad(path, "coordinate pairs must be [re, im]")
        return np.array([complex(x[0], x[1]) for x in raw])
    if not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in raw):
        raise _bad(path, "coordinates must be numbers")
    if len(raw) == 2 * n:
        return np.array([complex(raw[2 * i], raw[2 * i + 1]) for i in range(n)])
    if len(raw) == n:
        return np.array(raw, dtype=complex)
    raise _bad(path, f"expected {2 * n} or {n} numbers, got {len(raw)}")


def parse_values(raw, path: str) -> np.ndarray:
    if not isinstance(raw, list):
        raise _bad(path, "values must be a JSON array")
    out = []
    for i, v in enumerate(raw):
        if isinstance(v, list) and len(v) == 2:
            out.append(complex(v[0], v[1]))
        elif isinstance(v, (int, float)) and not isinstance(v, bool):
            out.append(complex(v))
        else:
            raise _bad(f"{path}[{i}]", "expected a number or [re, im]")
    return np.array(out)


def generate(gen: dict, n: int, path: str) -> np.ndarray:
    from .norms import ball_samples

    if not isinstance(gen, dict):
        raise _bad(path, "generator must be an object")
    for k in gen:
        if k not in GENERATOR_KEYS:
            raise _bad(f"{path}.{k}", "unknown key")
    kind = gen.get("kind")
    count = gen.get("count")
    if not isinstance(count, int) or count < 0:
        raise _bad(f"{path}.count", "must be a non-negative integer")
    if kind == "dyadic":
        pts = np.zeros((count, n), dtype=complex)
        pts[:, 0] = 1.0 - 2.0 ** -np.arange(1, count + 1)
        return pts
    if kind == "lattice":
        R = float(gen.get("max_radius", 0.6))
        m = 1
        while True:
            xs = np.linspace(-R, R, m)
            cand = [complex(x, y) for y in xs for x in xs if abs(complex(x, y)) < R]
            if len(cand) >= count or m > 1000:
                break
            m += 1
        pts = np.zeros((count, n), dtype=complex)
        pts[:, 0] = cand[:count]
        return pts
    if kind == "random":
        return ball_samples(n, count, int(gen.get("seed", 42)), float(gen.get("max_radius", 0.6)))
    raise _bad(f"{path}.kind", f"unknown generator {kind!r}")


def parse_config(source) -> dict:
    """Validated config with every default filled in.

    ``source`` is a path or an already-loaded dict. Raises InvalidParams naming
    the offending key, or LogKernelCase for s = n/2.
    """
    if isinstance(source, dict):
        raw = dict(source)
    else:
        p = Path(source)
        if not p.is_file():
            raise ToolkitError(ErrorKind.InvalidParams, f"config file not found: {source}")
        try:
            raw = json.loads(p.read_text())
        except json.JSONDecodeError as e:
            raise ToolkitError(ErrorKind.InvalidParams, f"config is not valid JSON: {e}") from None
    if not isinstance(raw, dict):
        raise _bad("$", "config must be a JSON object")
    for k in raw:
        if k not in KNOWN:
            raise _bad(f"$.{k}", "unknown key")
    for k in REQUIRED:
        if k not in raw:
            raise _bad(f"$.{k}", "missing")
    cfg = {**DEFAULTS, "p": 2.0, **raw}
    cfg["p"] = float(cfg["p"])
    cfg["s"] = float(cfg["s"])
    params = SpaceParams(cfg["n"], cfg["s"], cfg["p"], bool(cfg["override_sp_bound"]))
    for key in ("degree_cap", "mc_samples", "seed", "z_samples", "trials", "jmax", "lmax", "degree", "family_size"):
        if not isinstance(cfg[key], int) or isinstance(cfg[key], bool) or cfg[key] < 0:
            raise _bad(f"$.{key}", "must be a non-negative integer")
    if cfg["quadrature"] not in ("ExactMoments", "MonteCarlo"):
        raise _bad("$.quadrature", "must be ExactMoments or MonteCarlo")
    if "points" in cfg and "generator" in cfg:
        raise _bad("$", "give either points or generator, not both")
    cfg["_params"] = params
    cfg["_seq"] = _sequence(cfg, params, "points", "generator")
    cfg["_seq2"] = _sequence(cfg, params, "points2", "generator2") if ("points2" in cfg or "generator2" in cfg) else None
    for key in ("values", "lambda", "lambda2"):
        if key in cfg:
            cfg["_" + key] = parse_values(cfg[key], f"$.{key}")
    if "mu" in cfg:
        cfg["_mu"] = parse_point(cfg["mu"], params.n, "$.mu")
    return cfg


def _sequence(cfg, params, pkey, gkey):
    n = params.n
    if pkey in cfg:
        if not isinstance(cfg[pkey], list):
            raise _bad(f"$.{pkey}", "must be an array of points")
        pts = [parse_point(x, n, f"$.{pkey}[{i}]") for i, x in enumerate(cfg[pkey])]
        pts = np.array(pts, dtype=complex).reshape(len(pts), n)
    elif gkey in cfg:
        pts = generate(cfg[gkey], n, f"$.{gkey}")
    else:
        pts = np.zeros((0, n), dtype=complex)
    labels = cfg.get("labels", ()) if pkey == "points" else ()
    return PointSeq(params, pts, tuple(labels))


def echo_config(cfg: dict) -> dict:
    return {k: cfg[k] for k in sorted(cfg) if not k.startswith("_")}


# helpers ----------------------------------------------------------------------

class Report:
    def __init__(self, command, cfg):
        self.command = command
        self.cfg = cfg
        self.results = {}
        self.checks = {}
        self.csv = {}

    def check(self, name, value, threshold, op="<="):
        value = float(value)
        if op == "<=":
            ok = value <= threshold
        elif op == ">=":
            ok = value >= threshold
        else:
            ok = bool(value)
        self.checks[name] = {"value": value, "threshold": threshold, "op": op, "pass": bool(ok)}

    def flag(self, name, ok: bool):
        self.checks[name] = {"value": bool(ok), "threshold": True, "op": "is", "pass": bool(ok)}

    @property
    def passed(self):
        return all(c["pass"] for c in self.checks.values())

    def to_dict(self):
        return {
            "command": self.command,
            "version": __version__,
            "config": echo_config(self.cfg),
            "results": self.results,
            "checks": self.checks,
            "pass": self.passed,
        }


def _jsonable(o):
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.bool_,)):
        return bool(o)
    if isinstance(o, np.ndarray):
        if np.iscomplexobj(o):
            return {"re": o.real.tolist(), "im": o.imag.tolist()}
        return o.tolist()
    if isinstance(o, complex):
        return {"re": o.real, "im": o.imag}
    if isinstance(o, tuple):
        return list(o)
    raise TypeError(f"not serializable: {type(o)}")


def dumps(d) -> str:
    return json.dumps(d, sort_keys=True, indent=2, default=_jsonable, allow_nan=True) + "\n"


def _rng(cfg, salt=0):
    return np.random.default_rng(np.random.SeedSequence([cfg["seed"], salt]))


def _need_points(cfg, k=1):
    seq = cfg["_seq"]
    if len(seq) < k:
        raise ToolkitError(ErrorKind.InvalidParams, f"this command needs at least {k} point(s)")
    return seq


def _quad(cfg):
    from .norms import QuadratureSpec

    return QuadratureSpec(cfg["quadrature"], cfg["mc_samples"], cfg["seed"])


# commands ---------------------------------------------------------------------

def cmd_norms(cfg, rep: Report):
    from .kernels import Convention, kernel
    from .norms import Flavor, QuadratureSpec, hs2_inner, hsp_norm, monomial_moment, sphere_samples
    from .polyfn import PolyFn

    params = cfg["_params"]
    n, D = params.n, cfg["degree_cap"]
    rng = _rng(cfg, 1)
    fam = {"one": PolyFn.const(1.0, n, D)}
    for i in range(n):
        fam[f"z{i + 1}"] = PolyFn.variable(i, n, D)
    for i in range(cfg["family_size"]):
        fam[f"random{i}"] = PolyFn.random(n, min(cfg["degree"], D), rng, cap=D)
    quad = _quad(cfg)
    mc = QuadratureSpec.monte_carlo(cfg["mc_samples"], cfg["seed"])
    out = {}
    worst_z = 0.0
    for name, f in fam.items():
        row = {"FractionalShift": hsp_norm(f, params, quad).to_dict()}
        if params.s_is_integer:
            row["MaxDerivative"] = hsp_norm(f, params, quad, Flavor.MaxDerivative).to_dict()
        if params.p == 2 or (float(params.p).is_integer() and int(params.p) % 2 == 0):
            ex = hsp_norm(f, params)
            m = hsp_norm(f, params, mc)
            row["monte_carlo"] = m.to_dict()
            # zero-variance integrands (|f| constant on the sphere) agree to rounding
            if m.stderr > 1e-12 and abs(m.value - ex.value) > 1e-12 * max(1.0, ex.value):
                worst_z = max(worst_z, abs(m.value - ex.value) / m.stderr)
        out[name] = row
    rep.results["norms"] = out
    rep.check("constant_norm", abs(out["one"]["FractionalShift"]["value"] - 1.0), 1e-12)
    rep.check("mc_vs_exact_zscore", worst_z, 4.0)
    # moments against the sphere sample mean
    Z = sphere_samples(n, cfg["mc_samples"], cfg["seed"])
    moms = []
    worst_m = 0.0
    for alpha in [(0,) * n, (1,) + (0,) * (n - 1), (2,) + (1,) * (n - 1) if n > 1 else (3,)]:
        x = np.abs(np.prod(Z ** np.array(alpha), axis=1)) ** 2
        exact = monomial_moment(alpha, alpha, n)
        se = float(np.std(x, ddof=1) / math.sqrt(len(x)))
        z = abs(float(np.mean(x)) - exact) / se if se > 0 else abs(float(np.mean(x)) - exact) * 1e12
        worst_m = max(worst_m, z)
        moms.append({"alpha": list(alpha), "exact": exact, "mc": float(np.mean(x)), "stderr": se})
    rep.results["moments"] = moms
    rep.check("moment_zscore", worst_m, 4.0)
    # reproducing identity at the configured points
    worst = 0.0
    for a in cfg["_seq"].points:
        k = kernel(a, params, Convention.Exact, D).poly
        for f in fam.values():
            v = f(a)
            worst = max(worst, abs(hs2_inner(f, k, params) - v) / max(1.0, abs(v)))
    rep.results["reproducing_residual"] = worst
    rep.check("reproducing_identity", worst, 1e-10)


def cmd_kernel_gram(cfg, rep: Report):
    from .kernels import Convention, gram, proxies, riesz_bounds

    seq = _need_points(cfg)
    params = cfg["_params"]
    G = gram(seq, Convention.Model)
    E = gram(seq, Convention.Exact, cfg["degree_cap"], check=False)
    rep.results["model"] = G.to_dict()
    rep.results["exact"] = E.to_dict()
    rep.results["proxy_p"] = proxies(seq, params.p).tolist()
    rep.results["proxy_pprime"] = proxies(seq, params.p_prime).tolist() if params.p > 1 else None
    rep.check("hermitian", float(np.max(np.abs(G.entries - G.entries.conj().T))), 1e-14)
    scale = float(np.max(np.abs(G.entries)))
    rep.check("psd", G.min_eig() / scale, -1e-10, ">=")
    if params.p == 2:
        rep.results["riesz"] = riesz_bounds(seq)


def cmd_carleson(cfg, rep: Report):
    from .kernels import carleson_box_sup

    seq = cfg["_seq"]
    r = carleson_box_sup(seq, cfg["_params"], cfg["box_strategy"], seed=cfg["seed"])
    rep.results["carleson"] = r.to_dict()
    rep.csv["carleson"] = r.to_csv()
    rep.flag("finite_sup", math.isfinite(r.sup_ratio))


def cmd_separation(cfg, rep: Report):
    from .kernels import separation_stats

    st = separation_stats(_need_points(cfg, 2))
    rep.results["min_pseudo_hyperbolic"] = st["min_pseudo_hyperbolic"]
    rep.results["pair_matrix"] = st["pair_matrix"].tolist()
    rep.check("separated", st["min_pseudo_hyperbolic"], 0.0, ">=")


def cmd_pick(cfg, rep: Report):
    from .kernels import Convention, gram
    from .multipliers import pick_matrix, pick_min_norm

    seq = _need_points(cfg)
    vals = cfg.get("_values")
    if vals is None:
        vals = np.zeros(len(seq), dtype=complex)
        vals[0] = 1.0
    if len(vals) != len(seq):
        raise _bad("$.values", f"expected {len(seq)} values")
    r = pick_min_norm(seq, vals, cfg["_params"])
    rep.results["pick"] = r.to_dict()
    rep.results["values"] = vals
    lo = float(np.max(np.abs(vals)))
    rep.check("t_min_at_least_max_value", r.t_min - lo, -1e-12, ">=")
    # relative to the matrix scale, matching the feasibility test in the bisection
    K = gram(seq, Convention.Model).entries
    scale = float(np.max(np.abs(pick_matrix(K, vals, r.t_min)))) or 1.0
    rep.check("certificate_psd", r.certificate / scale, -settings.psd_tol, ">=")
    c = 2.0
    r2 = pick_min_norm(seq, c * vals, cfg["_params"])
    rep.check("homogeneity", abs(r2.t_min - c * r.t_min), 1e-8 * max(1.0, r.t_min))


def _interp_tol(cfg, key="_seq") -> float:
    # interpolation residuals are rounding times the conditioning of the truncated Gram
    from .kernels import Convention, gram

    G = gram(cfg[key], Convention.Model, cfg["degree_cap"], truncated=True, check=False).entries
    return max(1e-8, 1e-15 * float(np.linalg.cond(G)))


def _drury(cfg, key="_seq", estimate=True):
    from .drury import build_beta

    seq = cfg[key]
    if len(seq) == 0:
        raise ToolkitError(ErrorKind.InvalidParams, "this command needs at least 1 point")
    return build_beta(seq, cfg["_params"], cfg["degree_cap"], estimate=estimate)


def cmd_drury(cfg, rep: Report):
    from . import drury as dr
    from .polyfn import PolyFn

    sys_ = _drury(cfg)
    summ = dr.summary(sys_, (1, 2, 3), cfg["z_samples"], cfg["seed"])
    rng = _rng(cfg, 2)
    h = PolyFn.random(sys_.params.n, 3, rng, cap=3)
    dp = max(dr.derivative_plancherel_residual(sys_, h, j, seed=cfg["seed"]) for j in range(3))
    summ["derivative_plancherel_residual"] = dp
    rep.results["drury"] = summ
    tol = _interp_tol(cfg)
    rep.check("beta_interpolation", summ["beta_residual"], tol)
    rep.check("gamma_delta", summ["delta_residual"], tol)
    rep.check("plancherel", summ["plancherel_residual"], 1e-10)
    rep.check("derivative_plancherel", dp, 1e-9)
    for l, b in summ["power_sum"].items():
        rep.flag(f"power_sum_l{l}", b["pass"])


def cmd_extend(cfg, rep: Report):
    from .extension import default_power, extend_sequence

    sys_ = _drury(cfg, estimate=False)
    params = cfg["_params"]
    N = sys_.N
    rng = _rng(cfg, 3)
    lam = cfg.get("_lambda")
    if lam is None:
        lam = rng.standard_normal(N) + 1j * rng.standard_normal(N)
    if len(lam) != N:
        raise _bad("$.lambda", f"expected {N} values")
    l = int(cfg.get("l") or default_power(params))
    quad = _quad(cfg)
    r = extend_sequence(sys_, lam, l, quad=quad)
    mu = rng.standard_normal(N) + 1j * rng.standard_normal(N)
    r_mu = extend_sequence(sys_, mu, l, quad=quad)
    r_sum = extend_sequence(sys_, lam + mu, l, quad=quad)
    r_scaled = extend_sequence(sys_, 2.5 * lam, l, quad=quad)
    lin = r_sum.f.max_abs_diff(r.f + r_mu.f) / max(1.0, float(np.max(np.abs(r.f.coeffs))))
    rep.results["extension"] = r.to_dict()
    rep.results["linearity_residual"] = lin
    rep.results["homogeneity_gap"] = abs(r_scaled.norm_ratio - r.norm_ratio)
    rep.check("value_residual", float(np.max(r.value_residuals)), _interp_tol(cfg))
    rep.check("linearity", lin, 1e-12)
    rep.check("homogeneity", abs(r_scaled.norm_ratio - r.norm_ratio) / max(1.0, r.norm_ratio), 1e-10)
    rep.flag("finite_ratio", math.isfinite(r.norm_ratio))


def cmd_glue(cfg, rep: Report):
    from .extension import glue_and_assemble
    from .multipliers import multiplier_norm_estimate

    if cfg["_seq2"] is None:
        raise ToolkitError(ErrorKind.InvalidParams, "glue needs points2 or generator2")
    sys1 = _drury(cfg, estimate=False)
    sys2 = _drury(cfg, "_seq2", estimate=False) if len(cfg["_seq2"]) else None
    rng = _rng(cfg, 4)
    lam1 = cfg.get("_lambda")
    if lam1 is None:
        lam1 = rng.standard_normal(sys1.N) + 1j * rng.standard_normal(sys1.N)
    lam2 = cfg.get("_lambda2")
    n2 = 0 if sys2 is None else sys2.N
    if lam2 is None:
        lam2 = rng.standard_normal(n2) + 1j * rng.standard_normal(n2)
    g = glue_and_assemble(sys1, sys2, lam1, lam2, int(cfg.get("l") or 1))
    rep.results["glue"] = g.to_dict()
    params = cfg["_params"]
    if params.n == 1:
        est = multiplier_norm_estimate(g.M, params, max(g.M.degree, 0) + 8, random_count=5)
        rep.results["M_multiplier_estimate"] = est.to_dict()
    rep.check("m_values", g.m_residual, 1e-7)
    rep.check("M_values", g.M_residual, 1e-7)


def cmd_weighted(cfg, rep: Report):
    from .extension import dual_from_drury, weighted_interp

    params = cfg["_params"]
    q = float(cfg.get("q", 2 * params.p))
    r = 1.0 / (1.0 / params.p + 1.0 / q)
    if r < 1:
        raise _bad("$.q", f"r = {r} < 1")
    sys_ = _drury(cfg, estimate=False)
    lam = cfg.get("_lambda")
    if lam is None:
        rng = _rng(cfg, 5)
        lam = rng.standard_normal(sys_.N) + 1j * rng.standard_normal(sys_.N)
    w = weighted_interp(sys_.seq, dual_from_drury(sys_), lam, q, r, params, quad=_quad(cfg), with_norm=True)
    d = w.to_dict()
    d["q"], d["r"] = q, r
    rep.results["weighted"] = d
    rep.check("gamma_is_one", d["max_gamma_deviation"], 1e-12)
    rep.check("value_residual", d["max_value_residual"], _interp_tol(cfg))
    sp_ = d["split"]
    scale = max(1.0, sp_["lam_r_r"])
    rep.check("split_mu", abs(sp_["mu_p_p"] - sp_["lam_r_r"]) / scale, 1e-12)
    rep.check("split_nu", abs(sp_["nu_q_q"] - sp_["lam_r_r"]) / scale, 1e-12)


def cmd_automorphism(cfg, rep: Report):
    from .moebius import Automorphism, cocycle_residual, rudin_residual, unitary_gram_check
    from .norms import ball_samples

    params = cfg["_params"]
    n = params.n
    mu = cfg.get("_mu")
    if mu is None:
        mu = ball_samples(n, 1, cfg["seed"], 0.7)[0]
    phi = Automorphism.phi(mu, params)
    seq = cfg["_seq"]
    if len(seq) == 0:
        seq = PointSeq(params, ball_samples(n, 5, cfg["seed"] + 1, 0.9))
    ug = unitary_gram_check(phi, seq)
    others = ball_samples(n, 10, cfg["seed"] + 2, 0.8)
    coc = rud = inv = 0.0
    for i, nu in enumerate(others):
        psi = Automorphism.phi(nu, params)
        for a in seq.points:
            coc = max(coc, cocycle_residual(psi, phi, a))
            rud = max(rud, rudin_residual(nu, a))
            inv = max(inv, float(np.max(np.abs(psi(psi(a)) - a))))
    rep.results["mu"] = mu
    rep.results["unitary_gram"] = ug
    rep.results["cocycle_residual"] = coc
    rep.results["rudin_residual"] = rud
    rep.results["involution_residual"] = inv
    rep.check("unitary_gram", ug["max_residual"], 1e-10)
    rep.check("cocycle", coc, 1e-10)
    rep.check("rudin", rud, 1e-12)
    rep.check("involution", inv, 1e-12)


def cmd_type_exp(cfg, rep: Report):
    from .extension import rademacher_experiment
    from .norms import hs2_norm
    from .polyfn import PolyFn

    params = cfg["_params"]
    n, N = params.n, min(cfg["family_size"], 10)
    cap = max(cfg["degree"], N)
    if params.p == 2:
        mono = []
        for k in range(N):
            f = PolyFn.monomial((k,) + (0,) * (n - 1), 1.0, cap)
            mono.append(f / hs2_norm(f, params))
        par = rademacher_experiment(mono, params)
        rep.results["parseval"] = par
        rep.check("parseval_ratio", abs(par["ratio"] - 1.0), 0.02)
    rng = _rng(cfg, 6)
    fam = [PolyFn.random(n, cfg["degree"], rng, cap=cap) for _ in range(N)]
    quad = _quad(cfg) if params.p == 2 else None
    from .norms import QuadratureSpec

    if params.p != 2:
        quad = QuadratureSpec.monte_carlo(min(cfg["mc_samples"], 50_000), cfg["seed"])
    res = rademacher_experiment(fam, params, seed=cfg["seed"], quad=quad)
    rep.results["random_family"] = res
    rep.flag("first_sign_fixed", res["first_sign_fixed"]["pass"] and res["first_sign_fixed"]["pairwise_pass"])


def cmd_appendix(cfg, rep: Report):
    from . import appendix as ap

    jmax, lmax = cfg["jmax"], cfg["lmax"]
    ver = ap.verify_identities(jmax, lmax, cfg["trials"], cfg["seed"])
    cc = ap.cross_check(jmax, lmax)
    rep.results["verify"] = ver
    rep.results["cross_check"] = cc
    rep.results["exclusion"] = {
        f"{j},{l}": [str(a) for a in ap.exclusion_coeffs(j, l)] for j in range(jmax + 1) for l in range(lmax + 1)
    }
    rep.results["inclusion"] = {str(j): [str(a) for a in ap.inclusion_coeffs(j)] for j in range(jmax + 1)}
    rep.csv["appendix"] = ap.coefficient_csv(jmax, lmax)
    rep.check("max_residual", ver["max_residual"], 1e-10)
    rep.flag("paths_agree", cc["agree"])


HANDLERS = {
    "norms": cmd_norms,
    "kernel-gram": cmd_kernel_gram,
    "carleson": cmd_carleson,
    "separation": cmd_separation,
    "pick": cmd_pick,
    "drury": cmd_drury,
    "extend": cmd_extend,
    "glue": cmd_glue,
    "weighted": cmd_weighted,
    "automorphism": cmd_automorphism,
    "type-exp": cmd_type_exp,
    "appendix": cmd_appendix,
}


def _applicable(cmd, cfg):
    params = cfg["_params"]
    N = len(cfg["_seq"])
    if cmd in ("kernel-gram", "pick", "drury", "extend", "weighted") and N < 1:
        return "needs points"
    if cmd == "separation" and N < 2:
        return "needs two points"
    if cmd == "pick" and (params.p != 2 or params.rho > 1):
        return "outside the complete Pick regime"
    if cmd == "glue" and cfg["_seq2"] is None:
        return "needs a second sequence"
    if cmd == "weighted" and 1.0 / (1.0 / params.p + 1.0 / float(cfg.get("q", 2 * params.p))) < 1:
        return "r < 1"
    return None


def run(command: str, cfg: dict) -> dict:
    """Run one command under the config's settings and return the report dict."""
    with settings.override(degree_cap=cfg["degree_cap"], strict=bool(cfg["strict"]),
                           seed=cfg["seed"], mc_samples=cfg["mc_samples"]):
        if command == "all-checks":
            rep = Report(command, cfg)
            sub = {}
            for cmd, fn in HANDLERS.items():
                why = _applicable(cmd, cfg)
                if why:
                    sub[cmd] = {"skipped": why}
                    continue
                r = Report(cmd, cfg)
                fn(cfg, r)
                sub[cmd] = {"results": r.results, "checks": r.checks, "pass": r.passed}
                for name, c in r.checks.items():
                    rep.checks[f"{cmd}.{name}"] = c
                for k, v in r.csv.items():
                    rep.csv[k] = v
            rep.results = sub
        else:
            rep = Report(command, cfg)
            HANDLERS[command](cfg, rep)
    return rep


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hsball", description="Hardy-Sobolev ball toolkit experiments")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", help="JSON run configuration (optional for appendix)")
    ap.add_argument("--out", default="./out", help="output directory, or - for JSON on stdout")
    ap.add_argument("--seed", type=int, help="overrides the config seed (also HSBALL_SEED)")
    ap.add_argument("--strict", action="store_true", help="treat degree truncation as an error")
    ap.add_argument("--samples", type=int, help="Monte Carlo sample count")
    ap.add_argument("--jmax", type=int)
    ap.add_argument("--lmax", type=int)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.config is None:
            if args.command != "appendix":
                raise ToolkitError(ErrorKind.InvalidParams, "--config is required for this command")
            raw = {"n": 1, "s": 0.0}
        else:
            raw = args.config
        cfg = parse_config(raw)
        if args.seed is not None:
            cfg["seed"] = args.seed
        elif os.environ.get("HSBALL_SEED"):
            cfg["seed"] = int(os.environ["HSBALL_SEED"])
        if args.strict:
            cfg["strict"] = True
        if args.samples is not None:
            cfg["mc_samples"] = args.samples
        if args.jmax is not None:
            cfg["jmax"] = args.jmax
        if args.lmax is not None:
            cfg["lmax"] = args.lmax
        rep = run(args.command, cfg)
    except ToolkitError as e:
        print(e.to_json(), file=sys.stderr)
        return 1
    text = dumps(rep.to_dict())
    if args.out == "-":
        sys.stdout.write(text)
    else:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{args.command}.json").write_text(text)
        for name, body in rep.csv.items():
            (out / f"{name}.csv").write_text(body)
    return 0 if rep.passed else 2


if __name__ == "__main__":
    sys.exit(main())
