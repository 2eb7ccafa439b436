import numpy as np
import pytest
from hypothesis import given, settings as hsettings, strategies as st

from hsball import PointSeq, PolyFn, SpaceParams, mul
from hsball.drury import (
    beta_residual,
    build_beta,
    character_values,
    convolution_power,
    derivative_plancherel_residual,
    domination_split,
    power_sum_check,
    hat,
    hat_q_residual,
    derivative_power_residual,
    plancherel_residual,
    delta_residual,
    summary_json,
)
from hsball.norms import ball_samples

from conftest import seq_of

P1 = SpaceParams(1, 0.0)
DESK = [0.0, 0.4, 0.8j]


@pytest.fixture(scope="module")
def desk():
    return build_beta(seq_of(P1, *DESK), P1, 12)


def test_single_point():
    sys_ = build_beta(seq_of(P1, 0.3), P1, 8)
    assert sys_.beta[0].terms() == {(0,): 1}
    assert sys_.C_estimate == 1
    assert sys_.gamma[0].terms() == {(0,): 1}
    for l in (1, 2, 3):
        Q = convolution_power(sys_, l)
        assert Q[0].max_abs_diff(sys_.beta[0] ** l) < 1e-14
        b = power_sum_check(sys_, l, 200, 1)
        assert b.passed and b.max_sum == pytest.approx(1) and b.bound == 1


def test_two_points_character_table():
    sys_ = build_beta(seq_of(P1, 0.1, -0.6), P1, 12)
    pts = sys_.seq.points
    assert np.allclose(sys_.beta[0](pts), [-1, 1], atol=1e-9)
    assert np.allclose(sys_.beta[1](pts), [1, 1], atol=1e-12)
    assert sys_.gamma[0](pts[0]) == pytest.approx(1, abs=1e-9)
    assert abs(sys_.gamma[0](pts[1])) < 1e-9


def test_desk_values(desk):
    assert beta_residual(desk) < 1e-9
    assert delta_residual(desk) < 1e-8
    assert plancherel_residual(desk, 100, 3) < 1e-10
    assert desk.C_pick is not None and desk.C_estimate >= desk.C_pick * (1 - 1e-9)


def test_character_table_exact_phases():
    V = character_values(6)
    assert np.allclose(V[5], 1)
    assert np.allclose(V @ V.conj().T, 6 * np.eye(6), atol=1e-12)


def test_convolution_l1_is_beta(desk):
    assert convolution_power(desk, 1) == desk.beta


def test_hat_q_and_derivative_power(desk):
    h = PolyFn.random(1, 2, np.random.default_rng(2), cap=2)
    for l in (1, 2, 3):
        assert hat_q_residual(desk, l) < 1e-9
        for j in range(3):
            assert derivative_power_residual(desk, h, l, j) < 1e-9


def test_power_sum_desk(desk):
    b = power_sum_check(desk, 2, 1000, 42)
    assert b.passed and b.margin > 0
    # at a node the sum is at least the delta value
    G = np.array([g(desk.seq.points) for g in desk.gamma])
    assert np.all(np.sum(np.abs(G) ** 4, axis=0) >= 1 - 1e-9)


def test_domination_split(desk):
    h = PolyFn.random(1, 2, np.random.default_rng(5), cap=2)
    H, worst = domination_split(desk, h, 2, 1)
    assert len(H) == 3
    assert worst <= 1e-9
    H0, w0 = domination_split(desk, PolyFn.zero(1, 2), 2, 1)
    assert all(x.is_zero() for x in H0) and w0 == 0


def test_domination_single_point_equality():
    sys_ = build_beta(seq_of(P1, 0.5), P1, 6)
    h = PolyFn.variable(0, 1, 2) + 1
    H, worst = domination_split(sys_, h, 2, 1)
    assert H[0].max_abs_diff(mul(sys_.gamma_power(1, 2, H[0].cap), h.with_cap(H[0].cap))) < 1e-14
    assert abs(worst) < 1e-12


def test_hat_inverts_characters():
    N = 5
    vals = [np.array([float(k)]) for k in range(N)]
    back = hat(vals, N)
    V = character_values(N)
    rebuilt = [sum(V[j, k] * back[k] for k in range(N)) for j in range(N)]
    assert np.allclose(np.array(rebuilt).ravel(), np.arange(N))


def test_summary_json_stable(desk):
    assert summary_json(desk, seed=1) == summary_json(desk, seed=1)


@pytest.mark.parametrize("n,s,N", [(1, 0.0, 5), (1, 0.25, 8), (2, 0.5, 3), (2, 0.0, 5), (2, 0.5, 8)])
def test_identities_on_random_configs(n, s, N):
    par = SpaceParams(n, s)
    sys_ = build_beta(PointSeq(par, ball_samples(n, N, 10 + N, 0.7)), par, 12, estimate=False, pick=False)
    assert delta_residual(sys_) < 1e-8
    assert plancherel_residual(sys_, 100, 1) < 1e-10
    h = PolyFn.random(n, 3, np.random.default_rng(N), cap=3)
    for j in range(3):
        assert derivative_plancherel_residual(sys_, h, j, 100, 2) < 1e-9


@hsettings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 2**31), N=st.integers(1, 6))
def test_plancherel_property(seed, N):
    par = SpaceParams(2, 0.5)
    sys_ = build_beta(PointSeq(par, ball_samples(2, N, seed, 0.7)), par, 8, estimate=False, pick=False)
    assert plancherel_residual(sys_, 50, seed) < 1e-10
    # sum over l of gamma_l is (1/N) sum_j theta^{-jl} beta_j summed over l = beta_N = 1
    total = sum(sys_.gamma, PolyFn.zero(2, 8))
    assert total.max_abs_diff(PolyFn.const(1.0, 2, 8)) < 1e-9
