"""Root-of-unity interpolation and its discrete Fourier transform.

For N points a_1..a_N and theta = exp(2 pi i/N), beta_j interpolates
beta_j(a_k) = theta^{jk}. Then gamma_l = (1/N) sum_j theta^{-jl} beta_j satisfies
gamma_l(a_k) = delta_{lk}, and Plancherel on Z/N controls sums of |gamma_l|^2.
Indices j, k, l run over 1..N throughout.
"""

from __future__ import annotations

import dataclasses
import json
import math

import numpy as np

from .config import settings
from .errors import ErrorKind, ToolkitError
from .kernels import Convention
from .multipliers import interpolate, multiplier_norm_estimate, pick_min_norm
from .norms import ball_samples
from .params import PointSeq, SpaceParams
from .polyfn import PolyFn, mul, radial_derivative


@dataclasses.dataclass
class DrurySystem:
    seq: PointSeq
    params: SpaceParams
    cap: int
    beta: list
    gamma: list = dataclasses.field(default_factory=list)
    Q: dict = dataclasses.field(default_factory=dict)
    C_estimate: float = 1.0
    C_pick: float | None = None
    estimates: list = dataclasses.field(default_factory=list)
    paths: list = dataclasses.field(default_factory=list)

    @property
    def N(self) -> int:
        return len(self.seq)

    @property
    def theta(self) -> complex:
        return complex(np.exp(2j * np.pi / self.N))

    def character(self, j: int, k: int) -> complex:
        return complex(np.exp(2j * np.pi * ((j * k) % self.N) / self.N))

    def working_cap(self, l: int, extra: int = 0) -> int:
        return self.cap * l + extra

    def gamma_power(self, a: int, l: int, cap: int | None = None) -> PolyFn:
        """gamma_a^l without truncation (or at ``cap``)."""
        cap = self.working_cap(l) if cap is None else cap
        g = self.gamma[a - 1].with_cap(cap)
        out = PolyFn.const(1.0, self.params.n, cap)
        for _ in range(l):
            out = mul(out, g, strict=False, cap=cap)
        return out


def character_values(N: int) -> np.ndarray:
    """V[j-1, k-1] = theta^{jk}, reduced mod N to keep the phases exact."""
    j = np.arange(1, N + 1)
    return np.exp(2j * np.pi * (np.outer(j, j) % N) / N)


def build_beta(seq: PointSeq, params: SpaceParams | None = None, cap: int | None = None,
               estimate: bool = True, pick: bool = True) -> DrurySystem:
    """Interpolate the characters and estimate C(S) = max_j ||beta_j||_mult.

    Each beta_j is the constant function when its data is constant (j = N), else
    the minimal-norm truncated-kernel interpolant. C_estimate takes the max of
    the Galerkin, sampling and boundary-sup estimates; C_pick is the certified
    optimal value in the complete Pick regime (rho <= 1, p = 2), reported only.
    """
    params = params or seq.params
    cap = settings.degree_cap if cap is None else int(cap)
    N = len(seq)
    if N == 0:
        raise ToolkitError(ErrorKind.InvalidParams, "empty sequence")
    V = character_values(N)
    beta, paths = [], []
    for j in range(N):
        ip = interpolate(seq, V[j], Convention.Model, cap)
        beta.append(ip.poly)
        paths.append(ip.path)
    sys = DrurySystem(seq, params, cap, beta, paths=paths)
    if estimate:
        ests = [multiplier_norm_estimate(b, params, cap, seq=seq, with_sup=True) for b in beta]
        sys.estimates = ests
        sys.C_estimate = max(max(e.value for e in ests), 1.0)
    if pick and params.p == 2 and params.rho <= 1 + 1e-12:
        sys.C_pick = max(pick_min_norm(seq, V[j], params).t_min for j in range(N))
    return gamma_dft(sys)


def gamma_dft(sys: DrurySystem) -> DrurySystem:
    """gamma_l = (1/N) sum_j theta^{-jl} beta_j, coefficientwise."""
    N = sys.N
    B = np.array([b.coeffs for b in sys.beta])
    F = np.conj(character_values(N)) / N
    G = F @ B
    n, cap = sys.params.n, sys.cap
    sys.gamma = [PolyFn(n, cap, G[l]) for l in range(N)]
    return sys


def convolution_power(sys: DrurySystem, l: int) -> list:
    """Q_l(k) = (1/N) sum_j beta_j Q_{l-1}(k - j mod N), Q_1 = beta; exact products."""
    if l < 1:
        raise ToolkitError(ErrorKind.InvalidParams, "l must be >= 1")
    if l in sys.Q:
        return sys.Q[l]
    N = sys.N
    if l == 1:
        sys.Q[1] = list(sys.beta)
        return sys.Q[1]
    prev = convolution_power(sys, l - 1)
    cap = sys.working_cap(l)
    beta = [b.with_cap(cap) for b in sys.beta]
    out = []
    for k in range(1, N + 1):
        acc = PolyFn.zero(sys.params.n, cap)
        for j in range(1, N + 1):
            idx = (k - j - 1) % N
            acc = acc + mul(beta[j - 1], prev[idx].with_cap(cap), strict=False, cap=cap)
        out.append(acc / N)
    sys.Q[l] = out
    return out


def hat(values_by_k: list, N: int) -> list:
    """(1/N) sum_j theta^{-jk} Q(j) for k = 1..N, for polynomials or arrays."""
    F = np.conj(character_values(N)) / N
    return [sum(F[k, j] * values_by_k[j] for j in range(N)) for k in range(N)]


# identity checks ------------------------------------------------------------

def delta_residual(sys: DrurySystem) -> float:
    vals = np.array([g(sys.seq.points) for g in sys.gamma])
    return float(np.max(np.abs(vals - np.eye(sys.N))))


def beta_residual(sys: DrurySystem) -> float:
    vals = np.array([b(sys.seq.points) for b in sys.beta])
    return float(np.max(np.abs(vals - character_values(sys.N))))


def plancherel_residual(sys: DrurySystem, samples: int = 100, seed: int | None = None) -> float:
    """max_z |sum_l |gamma_l(z)|^2 - (1/N) sum_j |beta_j(z)|^2|."""
    Z = ball_samples(sys.params.n, samples, seed)
    G = np.array([g(Z) for g in sys.gamma])
    B = np.array([b(Z) for b in sys.beta])
    lhs = np.sum(np.abs(G) ** 2, axis=0)
    rhs = np.sum(np.abs(B) ** 2, axis=0) / sys.N
    return float(np.max(np.abs(lhs - rhs) / np.maximum(1.0, rhs)))


def derivative_plancherel_residual(sys: DrurySystem, h: PolyFn, j: int, samples: int = 100,
                                   seed: int | None = None) -> float:
    """max_z |sum_l |R^j(gamma_l h)|^2 - (1/N) sum_l |R^j(beta_l h)|^2| (relative)."""
    cap = sys.cap + max(h.degree, 0)
    hh = h.with_cap(cap)
    Z = ball_samples(sys.params.n, samples, seed)
    G = np.array([radial_derivative(mul(g.with_cap(cap), hh, strict=True), j)(Z) for g in sys.gamma])
    B = np.array([radial_derivative(mul(b.with_cap(cap), hh, strict=True), j)(Z) for b in sys.beta])
    lhs = np.sum(np.abs(G) ** 2, axis=0)
    rhs = np.sum(np.abs(B) ** 2, axis=0) / sys.N
    return float(np.max(np.abs(lhs - rhs) / np.maximum(1.0, rhs)))


def derivative_power_residual(sys: DrurySystem, h: PolyFn, l: int, j: int, samples: int = 100,
                 seed: int | None = None) -> float:
    """sum_k |R^j(gamma_k^l h)|^2 against (1/N) sum_k |R^j(Q_l(k) h)|^2."""
    cap = sys.working_cap(l, max(h.degree, 0))
    hh = h.with_cap(cap)
    Q = convolution_power(sys, l)
    Z = ball_samples(sys.params.n, samples, seed)
    G = np.array([radial_derivative(mul(sys.gamma_power(a, l, cap), hh, strict=True), j)(Z)
                  for a in range(1, sys.N + 1)])
    B = np.array([radial_derivative(mul(q.with_cap(cap), hh, strict=True), j)(Z) for q in Q])
    lhs = np.sum(np.abs(G) ** 2, axis=0)
    rhs = np.sum(np.abs(B) ** 2, axis=0) / sys.N
    return float(np.max(np.abs(lhs - rhs) / np.maximum(1.0, rhs)))


def hat_q_residual(sys: DrurySystem, l: int) -> float:
    """max coefficient gap between hat(Q_l)(k) and gamma_k^l."""
    cap = sys.working_cap(l)
    Q = [q.with_cap(cap) for q in convolution_power(sys, l)]
    H = hat(Q, sys.N)
    return max(H[k].max_abs_diff(sys.gamma_power(k + 1, l, cap)) for k in range(sys.N))


@dataclasses.dataclass
class BoundCheck:
    max_sum: float
    bound: float
    passed: bool
    margin: float

    def to_dict(self) -> dict:
        return {"max_sum": self.max_sum, "bound": self.bound, "pass": self.passed, "margin": self.margin}


def power_sum_check(sys: DrurySystem, l: int, z_samples: int = 1000, seed: int | None = None,
                    slack: float = 1.05) -> BoundCheck:
    """max over seeded z in the ball of sum_a |gamma_a(z)|^{2l}, against C_estimate^{2l}."""
    Z = ball_samples(sys.params.n, z_samples, seed)
    Z = np.vstack([Z, sys.seq.points])
    G = np.array([g(Z) for g in sys.gamma])
    sums = np.sum(np.abs(G) ** (2 * l), axis=0)
    m = float(sums.max())
    bound = sys.C_estimate ** (2 * l)
    return BoundCheck(m, bound, m <= bound * slack, bound * slack - m)


def domination_split(sys: DrurySystem, h: PolyFn, l: int, j: int, samples: int = 100,
                     seed: int | None = None):
    """H_q = Q_l(q) h, and the worst violation of
    |R^j(gamma_a^l h)(z)| <= (1/N) sum_q |R^j H_q(z)| over a and sample z.
    """
    cap = sys.working_cap(l, max(h.degree, 0))
    hh = h.with_cap(cap)
    H = [mul(q.with_cap(cap), hh, strict=True) for q in convolution_power(sys, l)]
    Z = ball_samples(sys.params.n, samples, seed)
    rhs = np.sum([np.abs(radial_derivative(Hq, j)(Z)) for Hq in H], axis=0) / sys.N
    worst = -math.inf
    for a in range(1, sys.N + 1):
        lhs = np.abs(radial_derivative(mul(sys.gamma_power(a, l, cap), hh, strict=True), j)(Z))
        worst = max(worst, float(np.max(lhs - rhs)))
    return H, worst


def summary(sys: DrurySystem, ls=(1, 2, 3), z_samples: int = 1000, seed: int | None = None) -> dict:
    return {
        "N": sys.N,
        "cap": sys.cap,
        "C_estimate": sys.C_estimate,
        "C_pick": sys.C_pick,
        "beta_paths": sys.paths,
        "beta_estimates": [e.to_dict() for e in sys.estimates],
        "beta_residual": beta_residual(sys),
        "delta_residual": delta_residual(sys),
        "plancherel_residual": plancherel_residual(sys, seed=seed),
        "power_sum": {str(l): power_sum_check(sys, l, z_samples, seed).to_dict() for l in ls},
    }


def summary_json(sys: DrurySystem, **kw) -> str:
    return json.dumps(summary(sys, **kw), sort_keys=True)
