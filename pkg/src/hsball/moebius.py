"""Ball automorphisms, the unimodular cocycle eta and the unitary action on kernels.

An automorphism is stored as a matrix M of U(n,1) acting on (z, 1):
M (z, 1) = j_M(z) (phi(z), 1) with j_M(z) = c.z + d. The cocycle rule
j_{TS}(a) = j_S(a) j_T(S a) then holds exactly, and eta(M, a) = (j/|j|)^rho.
"""

from __future__ import annotations

import math

import numpy as np

from .config import settings
from .errors import ErrorKind, ToolkitError
from .params import PointSeq, SpaceParams, as_point, inner
from .polyfn import PolyFn, basis


def _form(n):
    return np.diag(np.r_[np.ones(n), -1.0]).astype(complex)


class Automorphism:
    def __init__(self, matrix: np.ndarray, params: SpaceParams, label: str = ""):
        self.matrix = np.asarray(matrix, dtype=complex)
        self.params = params
        self.n = params.n
        self.label = label

    # construction ---------------------------------------------------------
    @classmethod
    def phi(cls, mu, params: SpaceParams) -> "Automorphism":
        """phi_mu(z) = (mu - P z - s Q z)/(1 - <z, mu>), s = sqrt(1-|mu|^2).

        P projects onto C mu and Q = I - P; phi_mu swaps mu and 0 and is an involution.
        """
        n = params.n
        mu = as_point(mu, n)
        r2 = float(np.vdot(mu, mu).real)
        s = math.sqrt(1.0 - r2)
        if r2 > 0:
            P = np.outer(mu, np.conj(mu)) / r2
        else:
            P = np.zeros((n, n), dtype=complex)
        Q = np.eye(n) - P
        M = np.zeros((n + 1, n + 1), dtype=complex)
        M[:n, :n] = -(P + s * Q)
        M[:n, n] = mu
        M[n, :n] = -np.conj(mu)
        M[n, n] = 1.0
        # scale into U(n,1); j then has positive real part on the ball
        return cls(M / s, params, label=f"phi({mu.tolist()})")

    @classmethod
    def unitary(cls, U, params: SpaceParams) -> "Automorphism":
        n = params.n
        M = np.eye(n + 1, dtype=complex)
        M[:n, :n] = U
        return cls(M, params, label="unitary")

    def compose(self, other: "Automorphism") -> "Automorphism":
        """self o other."""
        return Automorphism(self.matrix @ other.matrix, self.params, f"{self.label}o{other.label}")

    __matmul__ = compose

    def is_pseudo_unitary(self, tol=1e-10) -> bool:
        J = _form(self.n)
        return bool(np.max(np.abs(self.matrix.conj().T @ J @ self.matrix - J)) < tol)

    # action ---------------------------------------------------------------
    def j(self, z) -> complex:
        z = np.asarray(z, dtype=complex)
        return complex(self.matrix[self.n, : self.n] @ z + self.matrix[self.n, self.n])

    def __call__(self, z, check: bool = True) -> np.ndarray:
        z = as_point(z, self.n) if check else np.asarray(z, dtype=complex)
        w = self.matrix[: self.n, : self.n] @ z + self.matrix[: self.n, self.n]
        out = w / self.j(z)
        if check:
            as_point(out, self.n)
        return out

    def eta(self, a) -> complex:
        """(j(a)/|j(a)|)^rho with the principal branch."""
        ja = self.j(as_point(a, self.n))
        return complex(np.exp(1j * self.params.rho * np.angle(ja)))


def apply_phi(mu, z, params: SpaceParams) -> np.ndarray:
    return Automorphism.phi(mu, params)(z)


def eta(mu, a, params: SpaceParams) -> complex:
    """eta(phi_mu, a) = ((1 - <a, mu>)/|1 - <a, mu>|)^rho."""
    a = as_point(a, params.n)
    mu = as_point(mu, params.n)
    w = 1.0 - inner(a, mu)
    return complex((w / abs(w)) ** params.rho)


def normalized_kernel_inner(a, b, rho: float) -> complex:
    """<e_a, e_b> for the model kernel, e_a = k_a/||k_a||."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    ra = 1.0 - float(np.vdot(a, a).real)
    rb = 1.0 - float(np.vdot(b, b).real)
    return complex((1.0 - inner(b, a)) ** (-rho) * (ra * rb) ** (rho / 2))


def rudin_residual(mu, a) -> float:
    """|1 - |phi_mu(a)|^2 - (1-|mu|^2)(1-|a|^2)/|1 - <a, mu>|^2|."""
    mu = np.asarray(mu, dtype=complex)
    a = np.asarray(a, dtype=complex)
    params = SpaceParams(len(mu), 0.0, 1.0)
    w = apply_phi(mu, a, params)
    lhs = 1.0 - float(np.vdot(w, w).real)
    rhs = (1 - float(np.vdot(mu, mu).real)) * (1 - float(np.vdot(a, a).real)) / abs(1 - inner(a, mu)) ** 2
    return abs(lhs - rhs)


def unitary_gram_check(phi: Automorphism, seq: PointSeq) -> dict:
    """max |eta(a) conj(eta(b)) <e_phi(a), e_phi(b)> - <e_a, e_b>| over all pairs."""
    rho = phi.params.rho
    if math.isclose(rho, 0.0, abs_tol=1e-14):
        raise ToolkitError(ErrorKind.LogKernelCase, "rho = 0")
    pts = seq.points
    imgs = [phi(a) for a in pts]
    etas = [phi.eta(a) for a in pts]
    worst = 0.0
    for i in range(len(pts)):
        for k in range(len(pts)):
            lhs = etas[i] * np.conj(etas[k]) * normalized_kernel_inner(imgs[i], imgs[k], rho)
            worst = max(worst, abs(lhs - normalized_kernel_inner(pts[i], pts[k], rho)))
    return {"max_residual": float(worst), "pairs": len(pts) ** 2}


def cocycle_residual(psi: Automorphism, phi: Automorphism, a) -> float:
    """|eta(psi o phi, a) - eta(psi, phi(a)) eta(phi, a)|."""
    lhs = psi.compose(phi).eta(a)
    rhs = psi.eta(phi(a)) * phi.eta(a)
    return abs(lhs - rhs)


def reexpand(m: PolyFn, phi: Automorphism, cap: int | None = None, samples: int | None = None,
             seed: int | None = None) -> PolyFn:
    """Least-squares fit of m o phi in the monomials of degree <= cap.

    Points are drawn on the sphere, where phi and m o phi are still holomorphic
    in a neighborhood. This is approximate; the error decays with the degree.
    """
    from .kernels import _monomial_powers
    from .norms import sphere_samples

    cap = settings.degree_cap if cap is None else int(cap)
    b = basis(m.n, cap)
    count = samples or max(8 * b.size, 256)
    Z = sphere_samples(m.n, count, settings.seed if seed is None else seed)
    W = np.array([phi(z, check=False) for z in Z])
    y = m(W)
    V = _monomial_powers(Z, b.exps)
    c, *_ = np.linalg.lstsq(V, y, rcond=None)
    return PolyFn(m.n, cap, c)
