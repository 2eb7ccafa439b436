import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings as hsettings, strategies as st

from hsball import ErrorKind, PolyFn, SpaceParams, ToolkitError, mul
from hsball.norms import (
    Flavor,
    QuadratureSpec,
    ball_samples,
    hp_norm,
    hs2_inner,
    hs2_norm,
    hsp_norm,
    moment_fraction,
    monomial_moment,
    sphere_samples,
)


def test_moment_examples():
    assert monomial_moment((0, 0), (0, 0), 2) == 1
    assert moment_fraction((1, 0), (1, 0), 2) == Fraction(1, 2)
    assert moment_fraction((2, 1), (2, 1), 2) == Fraction(1, 12)
    assert monomial_moment((1, 0), (0, 1), 2) == 0


def test_moment_mc_cross_check():
    Z = sphere_samples(2, 200_000, 7)
    x = np.abs(Z[:, 0] ** 2 * Z[:, 1]) ** 2
    assert abs(x.mean() - 1 / 12) < 4 * x.std() / math.sqrt(len(x))


def test_hs2_inner_examples():
    p = SpaceParams(3, 1.0, 2.0)
    z1 = PolyFn.variable(0, 2, 4)
    z2 = PolyFn.variable(1, 2, 4)
    par = SpaceParams(2, 0.9)
    assert hs2_inner(z1, z1, par).real == pytest.approx(2 ** 1.8 * 0.5, rel=1e-14)
    assert hs2_inner(z1, z2, par) == 0
    z1_3 = PolyFn.variable(0, 3, 4)
    assert hs2_inner(z1_3, z1_3, p).real == pytest.approx(4 / 3, rel=1e-14)


def test_hs2_weight_formula_n2_s1():
    # the value 2 = (1+1)^2 * 1/2 via the weight table directly (SpaceParams rejects n=2, s=1)
    from hsball.norms import hs2_weights
    from hsball.polyfn import basis

    W = hs2_weights(2, 2, 1.0)
    assert W[basis(2, 2).index[(1, 0)]] == pytest.approx(2.0)


@pytest.mark.parametrize("n,s,p", [(1, 0.0, 2.0), (2, 0.5, 2.0), (2, 0.5, 4.0), (3, 1.0, 3.0), (1, 0.25, 3.0)])
def test_constant_has_norm_one(n, s, p):
    par = SpaceParams(n, s, p)
    one = PolyFn.const(1.0, n, 4)
    quad = QuadratureSpec.monte_carlo(20_000, 1)
    assert hsp_norm(one, par, quad if p % 2 else None).value == pytest.approx(1.0, abs=1e-12)
    if par.s_is_integer:
        assert hsp_norm(one, par, quad if p % 2 else None, Flavor.MaxDerivative).value == pytest.approx(1.0)


def test_unimodular_boundary():
    assert hsp_norm(PolyFn.variable(0, 1, 4), SpaceParams(1, 0.0, 4.0)).value == pytest.approx(1.0, abs=1e-14)


def test_z1_n2_exact_and_mc():
    par = SpaceParams(2, 0.0)
    f = PolyFn.variable(0, 2, 4)
    ex = hsp_norm(f, par)
    assert ex.value == pytest.approx(math.sqrt(0.5), abs=1e-14)
    mc = hsp_norm(f, par, QuadratureSpec.monte_carlo(200_000, 42))
    assert abs(mc.value - ex.value) <= 3 * mc.stderr
    assert mc.mode == "MonteCarlo"


def test_max_derivative_needs_integer_s():
    with pytest.raises(ToolkitError) as ei:
        hsp_norm(PolyFn.const(1.0, 1), SpaceParams(1, 0.25), flavor=Flavor.MaxDerivative)
    assert ei.value.kind is ErrorKind.InvalidParams


def test_underresolved_mc():
    spiky = PolyFn.from_terms({(0, 0): 1e-6, (12, 0): 1.0}, 2, 12)
    with pytest.raises(ToolkitError) as ei:
        hp_norm(spiky, 7.0, QuadratureSpec.monte_carlo(1000, 3))
    assert ei.value.kind is ErrorKind.QuadratureUnderResolved


def test_mc_needs_samples():
    with pytest.raises(ToolkitError):
        QuadratureSpec("MonteCarlo", 10, 1)


def test_sampling_deterministic_and_on_sphere():
    a = sphere_samples(3, 10_000, 5)
    b = sphere_samples(3, 10_000, 5, chunk=8192)
    assert np.array_equal(a, b)
    assert np.allclose(np.linalg.norm(a, axis=1), 1.0)
    B = ball_samples(2, 500, 5, max_radius=0.7)
    assert np.all(np.linalg.norm(B, axis=1) <= 0.7 + 1e-15)


def test_exact_l4_against_mc():
    f = PolyFn.random(2, 3, np.random.default_rng(3), cap=4)
    ex = hp_norm(f, 4.0)
    mc = hp_norm(f, 4.0, QuadratureSpec.monte_carlo(200_000, 9))
    assert abs(ex.value - mc.value) <= 4 * mc.stderr


@hsettings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**31), n=st.integers(1, 3), s=st.sampled_from([0.0, 0.25, 0.75]))
def test_hs2_norm_properties(seed, n, s):
    if abs(s - n / 2) < 1e-12 or 2 * s > n:
        return
    par = SpaceParams(n, s)
    r = np.random.default_rng(seed)
    f = PolyFn.random(n, 4, r, cap=6)
    g = PolyFn.random(n, 4, r, cap=6)
    assert hs2_norm(f + g, par) <= hs2_norm(f, par) + hs2_norm(g, par) + 1e-12
    assert hs2_norm(2.5j * f, par) == pytest.approx(2.5 * hs2_norm(f, par), rel=1e-12)
    assert hs2_inner(f, g, par) == pytest.approx(np.conj(hs2_inner(g, f, par)), rel=1e-12, abs=1e-12)
    assert hsp_norm(f, par).value == pytest.approx(hs2_norm(f, par), rel=1e-12)


def test_monotone_in_s(rng):
    for _ in range(50):
        n = int(rng.integers(1, 4))
        f = PolyFn.random(n, int(rng.integers(0, 6)), rng, cap=6)
        s, r = sorted(rng.uniform(0, 0.49 * n, 2))
        assert hsp_norm(f, SpaceParams(n, s)).value <= hsp_norm(f, SpaceParams(n, r)).value * (1 + 1e-12)


def test_mc_consistency_most_functions():
    r = np.random.default_rng(17)
    hits = 0
    for i in range(20):
        par = SpaceParams(2, 0.25)
        f = PolyFn.random(2, 3, r, cap=4)
        ex = hsp_norm(f, par).value
        mc = hsp_norm(f, par, QuadratureSpec.monte_carlo(50_000, 100 + i))
        hits += abs(mc.value - ex) <= 4 * mc.stderr
    assert hits >= 19


@pytest.mark.parametrize("s", [0, 1, 2, 3])
def test_young_ratio_bounded(s):
    from hsball.norms import young_ratio

    n = 3 if s != 1.5 else 1
    res = young_ratio(n, float(s), 4.0, 4.0, pairs=100, degree=4, seed=s)
    assert math.isfinite(res["max_ratio"])
    assert res["max_ratio"] <= 2 ** (s + 2)
    assert res["r"] == pytest.approx(2.0)
