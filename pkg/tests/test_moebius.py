import math

import numpy as np
import pytest
from hypothesis import given, settings as hsettings, strategies as st

from hsball import PointSeq, PolyFn, SpaceParams
from hsball.moebius import (
    Automorphism,
    apply_phi,
    cocycle_residual,
    eta,
    normalized_kernel_inner,
    reexpand,
    rudin_residual,
    unitary_gram_check,
)
from hsball.norms import ball_samples

from conftest import seq_of

P1 = SpaceParams(1, 0.0)
P2 = SpaceParams(2, 0.5)


def test_exchange_and_involution(rng):
    mu = np.array([0.3 + 0.2j, -0.1j])
    assert np.allclose(apply_phi(mu, mu, P2), 0, atol=1e-15)
    assert np.allclose(apply_phi(mu, [0, 0], P2), mu, atol=1e-15)
    for z in ball_samples(2, 20, 3, 0.95):
        assert np.max(np.abs(apply_phi(mu, apply_phi(mu, z, P2), P2) - z)) < 1e-12


def test_eta_examples():
    assert eta([0.0], [0.3j], P1) == 1
    assert eta([0.5], [0.0], P1) == pytest.approx(1)
    v = eta([0.5], [0.5j], P1)
    assert v == pytest.approx(np.exp(-1j * math.atan(0.25)), abs=1e-14)
    phi = Automorphism.phi([0.5], P1)
    assert phi.eta([0.5j]) == pytest.approx(v, abs=1e-14)


def test_unitary_gram_examples():
    phi = Automorphism.phi([0.5], P1)
    assert unitary_gram_check(phi, seq_of(P1, 0.3))["max_residual"] < 1e-14
    assert unitary_gram_check(phi, seq_of(P1, 0.0, 0.5j))["max_residual"] < 1e-12
    mu = ball_samples(2, 1, 11, 0.8)[0]
    seq = PointSeq(P2, ball_samples(2, 5, 12, 0.9))
    assert unitary_gram_check(Automorphism.phi(mu, P2), seq)["max_residual"] < 1e-10


def test_pseudo_unitary_and_unitary_maps():
    phi = Automorphism.phi([0.2, 0.4j], P2)
    assert phi.is_pseudo_unitary()
    th = 0.7
    U = np.array([[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]])
    u = Automorphism.unitary(U, P2)
    z = np.array([0.1, 0.2j])
    assert np.allclose(u(z), U @ z)
    assert u.eta(z) == 1


def test_normalized_kernel_inner_unit_diagonal():
    a = np.array([0.4, 0.3j])
    assert normalized_kernel_inner(a, a, 1.7) == pytest.approx(1.0)


def test_reexpand_linear():
    phi = Automorphism.phi([0.3], P1)
    z = PolyFn.variable(0, 1, 10)
    m = reexpand(z, phi, cap=30, seed=1)
    w = 0.2 + 0.1j
    assert abs(m(w) - phi([w])[0]) < 1e-4


@hsettings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**31), n=st.sampled_from([1, 2, 3]))
def test_cocycle_and_rudin(seed, n):
    par = {1: P1, 2: P2, 3: SpaceParams(3, 1.0)}[n]
    pts = ball_samples(n, 4, seed, 0.95)
    psi = Automorphism.phi(pts[0], par)
    phi = Automorphism.phi(pts[1], par)
    assert cocycle_residual(psi, phi, pts[2]) <= 1e-10
    assert rudin_residual(pts[0], pts[3]) <= 1e-12


def test_multiplier_estimate_invariant_under_automorphisms(rng):
    from hsball.multipliers import galerkin_norm

    for _ in range(5):
        m = PolyFn.random(1, 3, rng, cap=12)
        mu = [0.3 * np.exp(2j * np.pi * rng.random())]
        mp = reexpand(m, Automorphism.phi(mu, P1), cap=12, seed=2)
        assert abs(math.log(galerkin_norm(mp, 0.0, 12) / galerkin_norm(m, 0.0, 12))) <= 0.2
