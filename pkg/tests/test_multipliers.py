import math

import numpy as np
import pytest
from hypothesis import given, settings as hsettings, strategies as st

from hsball import ErrorKind, PointSeq, PolyFn, SpaceParams, ToolkitError
from hsball.kernels import Convention
from hsball.multipliers import (
    adjoint_eigen_residual,
    boundary_sup,
    galerkin_norm,
    interpolate,
    kernel_solve,
    min_norm_interpolant,
    multiplier_norm_estimate,
    pick_matrix,
    pick_min_norm,
    two_point_witness,
)
from hsball.norms import ball_samples, hs2_norm

from conftest import seq_of

P1 = SpaceParams(1, 0.0)


def test_interpolant_single_point():
    g = min_norm_interpolant(seq_of(P1, 0.0), [2.5])
    assert g.terms() == {(0,): 2.5}
    ip = interpolate(seq_of(P1, 0.3), [2.5])
    assert ip.path == "constant" and ip.norm_sq == pytest.approx(6.25)


def test_interpolant_two_point_weights():
    c, nsq = kernel_solve(seq_of(P1, 0.0, 0.5), [1, 0])
    assert np.allclose(c, [4, -3], atol=1e-12)
    assert nsq == pytest.approx(4.0)
    g = min_norm_interpolant(seq_of(P1, 0.0, 0.5), [1, 0], cap=40)
    assert g(np.array([0.0])) == pytest.approx(1, abs=1e-12)
    assert abs(g(np.array([0.5]))) < 1e-12


def test_zero_values_give_zero():
    assert min_norm_interpolant(seq_of(P1, 0.1, 0.6j), [0, 0]).is_zero()


def test_interpolation_exact_truncated(rng):
    par = SpaceParams(2, 0.5)
    seq = PointSeq(par, ball_samples(2, 6, 4, 0.8))
    v = rng.standard_normal(6) + 1j * rng.standard_normal(6)
    g = min_norm_interpolant(seq, v, cap=10)
    assert np.max(np.abs(g(seq.points) - v)) < 1e-9


def test_estimate_constant():
    e = multiplier_norm_estimate(PolyFn.const(-1.5, 1, 8), P1, 8)
    assert e.galerkin_upper == pytest.approx(1.5, abs=1e-10)
    assert e.sampling_lower == pytest.approx(1.5, abs=1e-10)


def test_estimate_shift():
    e = multiplier_norm_estimate(PolyFn.variable(0, 1, 24), P1, 24)
    assert e.galerkin_upper <= 1 + 1e-12
    assert e.sampling_lower >= 0.95


def test_sampling_below_galerkin(rng):
    par = SpaceParams(2, 0.25)
    m = PolyFn.random(2, 2, rng, cap=8)
    e = multiplier_norm_estimate(m, par, 8)
    assert e.sampling_lower <= e.galerkin_upper * (1 + 1e-12)


def test_estimate_p_not_two_runs():
    par = SpaceParams(1, 0.25, 3.0)
    e = multiplier_norm_estimate(PolyFn.variable(0, 1, 6), par, 6)
    assert 0.5 < e.sampling_lower < 2


def test_boundary_sup():
    m = PolyFn.from_terms({(0,): 1, (1,): 1}, 1, 4)
    assert boundary_sup(m) == pytest.approx(2.0, abs=1e-9)
    m2 = PolyFn.from_terms({(1, 0): 1, (0, 1): 1}, 2, 4)
    assert boundary_sup(m2) == pytest.approx(math.sqrt(2), abs=1e-6)


def test_adjoint_examples(rng):
    assert adjoint_eigen_residual(PolyFn.const(3.0, 1, 16), [0.4], P1, 16) < 1e-12
    assert adjoint_eigen_residual(PolyFn.variable(0, 1, 16), [0.0], P1, 16) < 1e-10
    for _ in range(10):
        m = PolyFn.random(1, 3, rng, cap=16)
        a = 0.4 * np.exp(2j * np.pi * rng.random()) * rng.random()
        assert adjoint_eigen_residual(m, [a], P1, 16) < 1e-6


def test_pick_examples():
    r = pick_min_norm(seq_of(P1, 0.0, 0.5), [1, 0], P1)
    assert r.t_min == pytest.approx(2.0, abs=1e-6)
    # closed-form determinant condition: (t^2 - 1) (4/3) t^2 >= t^4  <=>  t >= 2
    K = np.array([[1, 1], [1, 4 / 3]])
    assert np.linalg.eigvalsh(pick_matrix(K, [1, 0], 2.0 - 1e-4))[0] < 0
    assert np.linalg.eigvalsh(pick_matrix(K, [1, 0], 2.0 + 1e-4))[0] > 0
    one = pick_min_norm(seq_of(P1, 0.4j), [0.3 - 0.4j], P1)
    assert one.t_min == pytest.approx(0.5, abs=1e-10)
    const = pick_min_norm(seq_of(P1, 0.1, -0.5, 0.7j), [2j, 2j, 2j], P1)
    assert const.t_min == pytest.approx(2.0, abs=1e-10)


def test_pick_rejects_non_complete():
    with pytest.raises(ToolkitError) as ei:
        pick_min_norm(seq_of(SpaceParams(3, 0.5), [0.1, 0, 0]), [1])
    assert ei.value.kind is ErrorKind.InvalidParams


def test_pick_below_interpolant_multiplier_norm():
    # the Pick value is optimal, so every interpolating multiplier has at least that norm
    seq = seq_of(P1, 0.0, 0.5)
    g, t = two_point_witness([0.0], [0.5], P1, 30)
    assert g([0.0]) == pytest.approx(1, abs=1e-10)
    assert abs(g([0.5])) < 1e-10
    assert boundary_sup(g) >= t - 1e-6
    assert galerkin_norm(g, 0.0, 60) >= t - 1e-3


@hsettings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**31), N=st.integers(1, 5), c=st.floats(0.1, 10))
def test_pick_properties(seed, N, c):
    r = np.random.default_rng(seed)
    par = SpaceParams(2, 0.5)
    pts = ball_samples(2, N + 1, seed, 0.85)
    lam = r.standard_normal(N + 1) + 1j * r.standard_normal(N + 1)
    seq = PointSeq(par, pts[:N])
    try:
        t = pick_min_norm(seq, lam[:N], par).t_min
        t_big = pick_min_norm(PointSeq(par, pts), lam, par).t_min
        t_scaled = pick_min_norm(seq, c * lam[:N], par).t_min
    except ToolkitError as e:
        assert e.kind is ErrorKind.SingularGram
        return
    assert t >= np.max(np.abs(lam[:N])) * (1 - 1e-12)
    assert t_big >= t * (1 - 1e-8)
    assert t_scaled == pytest.approx(c * t, rel=1e-8)


def test_nesting_in_s(rng):
    for _ in range(10):
        m = PolyFn.random(1, 3, rng, cap=16)
        g = [galerkin_norm(m, s, 16) for s in (0, 1, 2)]
        assert g[0] <= g[1] * 1.05 and g[1] <= g[2] * 1.05


def test_separation_witness_symmetric(rng):
    pts = ball_samples(1, 6, 31, 0.9)
    for i in range(0, 6, 2):
        a, b = pts[i], pts[i + 1]
        ab = pick_min_norm(PointSeq(P1, np.array([a, b])), [1, 0], P1).t_min
        ba = pick_min_norm(PointSeq(P1, np.array([b, a])), [1, 0], P1).t_min
        assert ab == pytest.approx(ba, abs=1e-8)
