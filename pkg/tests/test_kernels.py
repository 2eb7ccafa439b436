import math

import numpy as np
import pytest
from hypothesis import given, settings as hsettings, strategies as st

from hsball import ErrorKind, PointSeq, PolyFn, SpaceParams, ToolkitError
from hsball.kernels import (
    Convention,
    PseudoBall,
    carleson_box_sup,
    gram,
    kernel,
    kernel_norm_proxy,
    model_tail_degree,
    pseudo_hyperbolic,
    riesz_bounds,
    separation_stats,
)
from hsball.norms import ball_samples, hs2_inner

from conftest import seq_of


def test_kernel_at_origin_is_one():
    k = kernel([0.0], SpaceParams(1, 0.0), Convention.Model, 8)
    assert k.poly.terms() == {(0,): 1}


def test_model_kernel_coefficients():
    k = kernel([0.5], SpaceParams(1, 0.0), Convention.Model, 8)
    assert k.poly.coeff((3,)).real == pytest.approx(1 / 8, abs=1e-15)
    k2 = kernel([0.5, 0.0], SpaceParams(2, 0.5), Convention.Model, 8)
    assert k2.poly.coeff((2, 0)).real == pytest.approx(1 / 4, abs=1e-15)


def test_model_kernel_matches_closed_form(rng):
    par = SpaceParams(2, 0.25)
    a = np.array([0.3 + 0.1j, -0.2j])
    k = kernel(a, par, Convention.Model, 40)
    z = np.array([0.1, 0.4 - 0.2j])
    assert k(z) == pytest.approx(k.closed_form(z), rel=1e-12)


def test_model_kernel_rho_zero_rejected():
    # rho = 0 needs s = n/2, already rejected by SpaceParams
    with pytest.raises(ToolkitError) as ei:
        SpaceParams(2, 1.0)
    assert ei.value.kind is ErrorKind.LogKernelCase


def test_proxy_examples():
    par = SpaceParams(2, 0.0)
    assert kernel_norm_proxy([0, 0], par, 2.0) == 1
    a = [math.sqrt(3) / 2, 0]
    assert kernel_norm_proxy(a, par, 2.0) == pytest.approx(4.0)


def test_gram_examples():
    par = SpaceParams(1, 0.0)
    assert np.allclose(gram(seq_of(par, 0.0)).entries, [[1]])
    G = gram(seq_of(par, 0.0, 0.5)).entries
    assert np.allclose(G, [[1, 1], [1, 4 / 3]], atol=1e-15)


def test_singular_gram():
    par = SpaceParams(1, 0.0)
    seq = seq_of(par, 0.5, 0.5 + 1e-9)
    with pytest.raises(ToolkitError) as ei:
        gram(seq)
    assert ei.value.kind is ErrorKind.SingularGram


def test_exact_kernel_reproduces(rng):
    par = SpaceParams(2, 0.5)
    for _ in range(5):
        f = PolyFn.random(2, 6, rng, cap=10)
        a = ball_samples(2, 1, int(rng.integers(1 << 30)), 0.9)[0]
        k = kernel(a, par, Convention.Exact, 10).poly
        assert hs2_inner(f, k, par) == pytest.approx(f(a), rel=1e-10)


def test_tail_degree():
    D = model_tail_degree(0.25, 1.0, 1e-14)
    full = 1 / (1 - 0.25)
    assert abs(full - sum(0.25 ** k for k in range(D + 1))) <= 1e-14 * full
    assert abs(full - sum(0.25 ** k for k in range(D - 1))) > 1e-14 * full
    assert model_tail_degree(0.0, 1.0) == 0


def test_carleson_single_point_ratio_one():
    par = SpaceParams(1, 0.0)
    a = 0.6
    r = carleson_box_sup(seq_of(par, a), par, "points")
    ratios = {round(h, 12): ratio for _, h, _, ratio in r.rows}
    assert ratios[round(1 - a * a, 12)] == pytest.approx(1.0, abs=1e-14)


def test_carleson_empty():
    par = SpaceParams(1, 0.0)
    seq = PointSeq(par, np.zeros((0, 1), complex))
    assert carleson_box_sup(seq, par).sup_ratio == 0


def test_carleson_dyadic_bounded_and_stable():
    par = SpaceParams(1, 0.0)
    pts = [1 - 2.0 ** -k for k in range(1, 11)]
    seq = seq_of(par, *pts)
    r1 = carleson_box_sup(seq, par, "standard").sup_ratio
    r2 = carleson_box_sup(seq, par, "dyadic").sup_ratio
    assert 1 <= r1 <= 4 and 1 <= r2 <= 4
    assert abs(r2 - r1) <= 0.5 * r1
    # direct summation oracle: box at zeta=1, h = 2^-m holds a_k with 2^-k < 2^-m
    for m in range(1, 10):
        tail = sum(1 - a * a for a in pts if 1 - a < 2.0 ** -m)
        assert tail <= 4 * 2.0 ** -m


def test_carleson_csv_header():
    par = SpaceParams(2, 0.5)
    r = carleson_box_sup(seq_of(par, [0.3, 0.1j]), par, "points")
    lines = r.to_csv().splitlines()
    assert lines[0] == "center,h,mass,ratio"
    assert len(lines) == 1 + r.boxes_tested


def test_pseudo_ball_validation():
    with pytest.raises(ToolkitError):
        PseudoBall(np.array([0.5]), 0.1)
    assert PseudoBall(np.array([1.0]), 0.5).contains([[0.9]])[0]


def test_separation_examples():
    par1 = SpaceParams(1, 0.0)
    assert separation_stats(seq_of(par1, 0.0, 0.5))["min_pseudo_hyperbolic"] == pytest.approx(0.5)
    assert pseudo_hyperbolic([0.3], [0.3]) == 0
    par2 = SpaceParams(2, 0.5)
    st_ = separation_stats(seq_of(par2, [0.5, 0], [0, 0.5]))
    assert st_["min_pseudo_hyperbolic"] == pytest.approx(math.sqrt(7) / 4, abs=1e-12)


def test_riesz_examples():
    par = SpaceParams(1, 0.0)
    assert riesz_bounds(seq_of(par, 0.3)) == {"lower": pytest.approx(1), "upper": pytest.approx(1), "A2": pytest.approx(1)}
    r = riesz_bounds(seq_of(par, 0.0, 0.5))
    assert r["lower"] == pytest.approx(1 - math.sqrt(3) / 2, abs=1e-12)
    assert r["upper"] == pytest.approx(1 + math.sqrt(3) / 2, abs=1e-12)
    with pytest.raises(ToolkitError):
        riesz_bounds(seq_of(SpaceParams(1, 0.0, 3.0), 0.1))


def test_riesz_lower_increases_with_separation():
    par = SpaceParams(1, 0.0)
    lows = []
    for t in (0.2, 0.5, 0.8, 0.95):
        lows.append(riesz_bounds(seq_of(par, -t, t))["lower"])
    assert all(b > a for a, b in zip(lows, lows[1:]))
    assert lows[-1] > 0.9


@hsettings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**31), n=st.integers(1, 3), N=st.integers(1, 6))
def test_gram_hermitian_psd(seed, n, N):
    s = 0.0 if n > 1 else 0.25
    par = SpaceParams(n, s)
    pts = ball_samples(n, N, seed, 0.9)
    G = gram(PointSeq(par, pts), check=False)
    E = G.entries
    assert np.max(np.abs(E - E.conj().T)) <= 1e-14
    assert G.min_eig() >= -1e-10 * np.max(np.abs(E))


def test_dual_exponent_identity():
    # ||k_{0,a}||_{q'} = ||k_{s,a}||_{s,p'} in proxy form when 1/q = 1/p - s/n
    from hsball import sobolev_embedding_q

    for n, s, p in ((2, 0.5, 2.0), (3, 1.0, 2.5), (1, 0.25, 3.0)):
        par = SpaceParams(n, s, p)
        q = sobolev_embedding_q(par)
        a = np.full(n, 0.5 / math.sqrt(n))
        lhs = kernel_norm_proxy(a, SpaceParams(n, 0.0, q), q / (q - 1))
        rhs = kernel_norm_proxy(a, par, par.p_prime)
        assert lhs == pytest.approx(rhs, rel=1e-12)


def test_carleson_finite_for_smaller_s():
    pts = [1 - 2.0 ** -k for k in range(1, 11)]
    for n, s_big in ((1, 0.4), (2, 0.9)):
        base = SpaceParams(n, s_big)
        seq = seq_of(base, *[[x] + [0] * (n - 1) for x in pts])
        ratios = []
        for s in np.linspace(0, s_big, 4):
            par = SpaceParams(n, float(s))
            ratios.append(carleson_box_sup(PointSeq(par, seq.points), par).sup_ratio)
        assert all(math.isfinite(x) for x in ratios)
