import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from barriertop.classical import (ModeVector, Stability, action_coefficients, action_functional,
                                  amplitude_to_mode, bifurcation_boundaries, classical_action, critical_point,
                                  cubic_coefficients, cubic_discriminant, cubic_slope, harmonic_action,
                                  higher_modes, initial_modes, line_re, mode_eigenvalue, mode_source,
                                  mode_to_amplitude, overlap_coefficient, solve_cubic, solve_full_modes)
from barriertop.model import BarrierParams, DomainError, Endpoints, lambda1_from_theta, theta_from_lambda1

PI = np.pi
P5 = BarrierParams({3: 0.2, 4: 1.0}, 0.01)


def quad_overlap(idx):
    f = lambda x: np.prod([np.sin(PI * k * x) for k in idx])
    return 2.0 * quad(f, 0.0, 1.0, limit=200, epsabs=1e-14, epsrel=1e-13)[0]


def test_mode_eigenvalue_examples():
    assert mode_eigenvalue(PI, 1) == pytest.approx(0.0, abs=1e-15)
    assert mode_eigenvalue(PI, 2) == pytest.approx(3.0, abs=1e-14)
    assert mode_eigenvalue(PI / 2, 1) == pytest.approx(3.0, abs=1e-14)


def test_mode_source_examples():
    th = 2.3
    ep = Endpoints.from_rz(0.7, -0.4)
    assert mode_source(th, ep, 1) == pytest.approx(4 * PI * 0.7 / th, rel=1e-14)
    assert mode_source(th, Endpoints.from_rz(0.7, 0.0), 2) == 0.0
    assert mode_source(PI, Endpoints.from_qq(1.0, 0.0), 2) == pytest.approx(4.0, rel=1e-14)
    for k in (3, 5):
        assert mode_source(th, ep, k) == pytest.approx(4 * PI * k * 0.7 / th, rel=1e-14)
    assert mode_source(th, ep, 4) == pytest.approx(2 * PI * 4 * -0.4 / th, rel=1e-14)


def test_overlap_anchors():
    assert abs(overlap_coefficient((1, 1, 1)) - 8 / (3 * PI)) <= 1e-14
    assert abs(overlap_coefficient((1, 1, 1, 1)) - 0.75) <= 1e-14
    assert overlap_coefficient((1, 1, 2)) == 0.0
    assert overlap_coefficient((1, 1, 3)) == pytest.approx(-8 / (15 * PI), abs=1e-15)
    assert overlap_coefficient((2, 3)) == 0.0
    assert overlap_coefficient((3, 3)) == pytest.approx(1.0, abs=1e-15)


def test_overlap_parity_and_quadrature():
    for n in range(2, 6):
        for idx in itertools.combinations_with_replacement(range(1, 5), n):
            d = overlap_coefficient(idx)
            forbidden = (n % 2 == 0 and sum(idx) % 2 == 1) or (n % 2 == 1 and sum(idx) % 2 == 0)
            if forbidden:
                assert d == 0.0, idx
            assert d == pytest.approx(quad_overlap(idx), abs=1e-12), idx


@given(st.lists(st.integers(1, 9), min_size=2, max_size=6), st.randoms())
def test_overlap_symmetric(idx, rnd):
    perm = list(idx)
    rnd.shuffle(perm)
    assert overlap_coefficient(perm) == overlap_coefficient(idx)


def test_overlap_rejects_short():
    with pytest.raises(ValueError):
        overlap_coefficient((1,))


def test_critical_point_examples():
    cd = critical_point(BarrierParams({3: 0.0, 4: 1.0}, 0.01))
    assert (cd.lambda_c, cd.r_c, cd.Q_c) == (0.0, 0.0, 0.0)
    cd = critical_point(P5)
    assert cd.lambda_c == pytest.approx(256 / 81 * 0.04 / PI ** 2, rel=1e-14)
    assert cd.lambda_c == pytest.approx(0.012809, abs=5e-7)
    # -16 a3 / (27 pi a4) eps^(-1/3) evaluated independently
    assert cd.Q_c == pytest.approx(-0.1751068, abs=1e-7)
    assert cd.lambda_0 == 0.75 * cd.lambda_c and cd.Q_0 == 1.5 * cd.Q_c
    assert cd.theta == pytest.approx(theta_from_lambda1(cd.lambda_c))
    assert cd.r_c == pytest.approx(3 * cd.theta ** 2 / (2 * PI) * cd.Q_c ** 3, rel=1e-14)
    # lambda_c does not depend on epsilon
    assert critical_point(BarrierParams({3: 0.2, 4: 1.0}, 0.1)).lambda_c == cd.lambda_c


def test_critical_point_policies():
    q = critical_point(P5, "query", lambda1=0.0)
    assert q.theta == pytest.approx(PI)
    assert critical_point(P5, 2.0).theta == 2.0
    with pytest.raises(ValueError):
        critical_point(P5, "query")


def test_bifurcation_examples():
    cd = critical_point(P5)
    rm, rp = bifurcation_boundaries(P5, cd.lambda_c)
    assert rm == pytest.approx(cd.r_c, rel=1e-14) and rp == pytest.approx(cd.r_c, rel=1e-14)
    rm, rp = bifurcation_boundaries(P5, 0.0)
    rc0 = critical_point(P5, "query", lambda1=0.0).r_c
    assert rm == pytest.approx(-4 * rc0, rel=1e-14) and rp == pytest.approx(0.0, abs=1e-18)
    with pytest.raises(DomainError):
        bifurcation_boundaries(P5, 1.01 * cd.lambda_c)


def test_discriminant_vanishes_on_boundaries():
    lc = critical_point(P5).lambda_c
    for lam in np.linspace(0.01, 0.99, 25) * lc:
        th = theta_from_lambda1(lam)
        for r in bifurcation_boundaries(P5, lam):
            assert abs(cubic_discriminant(P5, th, r)) <= 1e-10


def test_line_re():
    cd = critical_point(P5)
    assert line_re(P5, cd.lambda_c) == pytest.approx(cd.r_c, rel=1e-14)
    assert line_re(P5, 0.0) == pytest.approx(-2 * critical_point(P5, "query", lambda1=0.0).r_c, rel=1e-14)
    for lam in (0.0, 0.5 * cd.lambda_c, cd.lambda_c):
        th = theta_from_lambda1(lam)
        bs = solve_cubic(P5, th, line_re(P5, lam))
        assert np.min(np.abs(bs.roots - cd.Q_c)) <= 1e-10


def test_cubic_symmetric_single_root():
    p = BarrierParams({3: 0.0, 4: 1.0}, 0.01)
    bs = solve_cubic(p, theta_from_lambda1(0.1), 0.0)
    assert len(bs) == 1 and bs.solutions[0].Q == 0.0 and bs.solutions[0].stability is Stability.STABLE


@pytest.mark.parametrize("frac", [0.1, 0.4, 0.9])
def test_cubic_r0_closed_form(frac):
    cd = critical_point(P5)
    lam = frac * cd.lambda_0
    bs = solve_cubic(P5, theta_from_lambda1(lam), 0.0)
    root = np.sqrt(1 - lam / cd.lambda_0)
    expect = sorted([0.0, cd.Q_0 * (1 + root), cd.Q_0 * (1 - root)])
    np.testing.assert_allclose(bs.roots, expect, rtol=1e-12, atol=1e-14)
    assert [s.stability for s in bs.solutions] == [Stability.STABLE, Stability.UNSTABLE, Stability.STABLE]


def test_cubic_r0_at_crossover():
    cd = critical_point(P5)
    bs = solve_cubic(P5, PI, 0.0)
    assert len(bs) == 2
    assert bs.roots[0] == pytest.approx(2 * cd.Q_0, rel=1e-12)
    assert bs.solutions[1].Q == 0.0 and bs.solutions[1].stability is Stability.MARGINAL


def test_cubic_at_lambda0_double_root():
    cd = critical_point(P5)
    bs = solve_cubic(P5, theta_from_lambda1(cd.lambda_0), 0.0)
    assert len(bs) == 2
    marg = [s for s in bs.solutions if s.stability is Stability.MARGINAL]
    assert len(marg) == 1 and marg[0].Q == pytest.approx(cd.Q_0, rel=1e-10)


def test_cubic_cusp_triple_root():
    cd = critical_point(P5)
    bs = solve_cubic(P5, cd.theta, cd.r_c)
    assert len(bs) == 1
    assert bs.solutions[0].Q == pytest.approx(cd.Q_c, rel=1e-7)


def test_cubic_matches_numpy_roots():
    rng = np.random.default_rng(1)
    for _ in range(200):
        th = rng.uniform(2.5, 3.6)
        r = rng.uniform(-0.5, 0.5)
        coef = cubic_coefficients(P5, th, r)
        ref = np.roots(coef)
        ref = np.sort(ref[np.abs(ref.imag) < 1e-9].real)
        bs = solve_cubic(P5, th, r)
        if len(bs) == len(ref):
            np.testing.assert_allclose(bs.roots, ref, rtol=1e-8, atol=1e-10)


@settings(max_examples=300, deadline=None)
@given(st.floats(-0.03, 0.05), st.floats(-0.6, 0.6))
def test_cubic_residual_and_labels(lam, r):
    th = theta_from_lambda1(lam)
    bs = solve_cubic(P5, th, r)
    A, B, C, D = cubic_coefficients(P5, th, r)
    assert list(bs.roots) == sorted(bs.roots)
    for s in bs.solutions:
        Q = s.Q
        scale = max(abs(A), abs(B), abs(C), abs(D)) * max(1.0, abs(Q)) ** 3
        assert abs(((A * Q + B) * Q + C) * Q + D) <= 1e-12 * scale
        slope = cubic_slope(P5, th, Q)
        if s.stability is Stability.STABLE:
            assert slope > 0 or len(bs) < 3
        elif s.stability is Stability.UNSTABLE:
            assert slope < 0
    if len(bs) == 3:
        assert [s.stability for s in bs.solutions] == [Stability.STABLE, Stability.UNSTABLE, Stability.STABLE]


def test_root_count_geometry():
    rng = np.random.default_rng(7)
    lc = critical_point(P5).lambda_c
    checked = 0
    while checked < 500:
        lam = rng.uniform(-lc, lc)
        rm, rp = bifurcation_boundaries(P5, lam)
        lo, hi = min(rm, rp), max(rm, rp)
        r = rng.uniform(lo - 0.2, hi + 0.2)
        if min(abs(r - lo), abs(r - hi)) < 1e-10:
            continue
        n = len(solve_cubic(P5, theta_from_lambda1(lam), r))
        assert n == (3 if lo < r < hi else 1), (lam, r)
        checked += 1


def test_amplitude_conversion_roundtrip():
    Q1 = amplitude_to_mode(P5, 3.0, -0.2)
    assert Q1 == pytest.approx(2 * 3.0 * -0.2 * 0.01 ** (-2 / 3))
    assert mode_to_amplitude(P5, 3.0, Q1) == pytest.approx(-0.2, rel=1e-15)


def test_higher_modes_examples():
    th = 3.0
    ep = Endpoints.from_rz(0.3, 0.0)
    m = higher_modes(P5, th, ep, 2.5, 8)
    assert m.amplitudes[1] == 0.0
    g = P5.epsilon / th
    q3 = (mode_source(th, ep, 3) - 0.2 * g * (-8 / (15 * PI)) * 2.5 ** 2
          - g * g * overlap_coefficient((1, 1, 1, 3)) * 2.5 ** 3) / mode_eigenvalue(th, 3)
    assert m.amplitudes[2] == pytest.approx(q3, rel=1e-14)
    assert m.amplitudes[0] == 2.5
    ep2 = Endpoints.from_rz(0.3, 0.5)
    h = higher_modes(P5, th, ep2, 0.0, 8)
    k = np.arange(2, 9)
    np.testing.assert_allclose(h.amplitudes[1:], mode_source(th, ep2, k) / mode_eigenvalue(th, k), rtol=1e-14)
    with pytest.raises(DomainError):
        higher_modes(P5, 2 * PI, ep, 1.0, 4)


def test_harmonic_action_examples():
    assert harmonic_action(1.3, 0.0, 0.0) == 0.0
    assert harmonic_action(PI / 2, 0.0, 1.0) == pytest.approx(-0.5, rel=1e-14)
    assert harmonic_action(PI / 2, 2.0, 0.0) == pytest.approx(0.5, rel=1e-14)
    with pytest.raises(DomainError):
        harmonic_action(PI, 0.0, 1.0)


def test_action_zero_path():
    for th in (1.0, PI, 4.0):
        assert classical_action(P5, th, 0.0, 0.0, 0.0) == 0.0


def test_action_coefficients_harmonic_identities():
    for th in (0.5, 1.0, 2.0, 2.9, 3.5, 5.0):
        lam, om, _, lam3 = action_coefficients(th)
        l1 = lambda1_from_theta(th)
        assert lam == pytest.approx(2 * PI ** 2 / (th ** 2 * l1) - th / 2 * np.tan(th / 2), rel=1e-12)
        assert om == pytest.approx(th / 8 / np.tan(th / 2), rel=1e-12, abs=1e-15)
        assert lam3 == pytest.approx(mode_eigenvalue(th, 3), rel=1e-14)


def test_action_coefficients_limits_at_crossover():
    lam, om, gam, _ = action_coefficients(PI)
    assert lam == pytest.approx(1.5, abs=1e-15)
    assert om == pytest.approx(0.0, abs=1e-15)
    assert gam == pytest.approx(-5 / 12 + 112 / (27 * PI ** 2), abs=1e-14)
    for h in (1e-3, 1e-5, 1e-7):
        lo = np.array(action_coefficients(PI - h)[:3])
        hi = np.array(action_coefficients(PI + h)[:3])
        np.testing.assert_allclose(0.5 * (lo + hi), [lam, om, gam], atol=max(h * h, 1e-13))
    with pytest.raises(DomainError):
        action_coefficients(2 * PI)


def test_action_continuous_through_crossover():
    p = BarrierParams({3: 0.2, 4: 1.0, 5: 0.3, 6: 0.1}, 0.01)
    for Q in (-0.5, -0.17, 0.2):
        mid = classical_action(p, PI, 0.3, 0.1, Q)
        for h in (1e-5, 1e-6):
            two_sided = 0.5 * (classical_action(p, PI - h, 0.3, 0.1, Q) + classical_action(p, PI + h, 0.3, 0.1, Q))
            assert two_sided == pytest.approx(mid, abs=1e-8)


def test_action_leading_order_at_lambda0_and_crossover():
    # with a3 ~ eps^(1/3) the amplitudes stay O(1) and the remainder is O(1)
    rem0, rem1, leads = [], [], []
    for eps in (1e-2, 1e-3, 1e-4):
        p = BarrierParams({3: 0.2 * (eps / 0.01) ** (1 / 3), 4: 1.0}, eps)
        cd = critical_point(p)
        th = theta_from_lambda1(cd.lambda_0)
        lead = th / 4 * cd.Q_0 ** 4 * eps ** (-2 / 3)
        rem0.append(classical_action(p, th, 0, 0, cd.Q_0) - lead)
        lead2 = -4 * PI * cd.Q_0 ** 4 * eps ** (-2 / 3)
        rem1.append(classical_action(p, PI, 0, 0, 2 * cd.Q_0) - lead2)
        leads.append(lead)
    assert leads[-1] > 4 * leads[0]
    assert np.ptp(rem0) < 1e-7 and abs(rem0[0]) < 1e-3
    assert np.ptp(rem1) < 1e-7 and abs(rem1[0]) < 1e-2


def test_action_high_temperature_limit():
    # tiny anharmonicity: the single path reproduces the inverted oscillator
    p = BarrierParams({3: 1e-6, 4: 1e-6}, 0.01)
    for th in (0.8, 1.5, 2.5):
        for r in (-0.8, 0.4):
            Q = solve_cubic(p, th, r).solutions[0].Q
            s = classical_action(p, th, 0.5, r, Q)
            assert s == pytest.approx(harmonic_action(th, 0.5, r), rel=1e-5)


def test_action_functional_harmonic_convergence():
    p = BarrierParams({}, 0.01)
    th = 2.5
    ep = Endpoints.from_rz(0.7, 0.4)
    exact = harmonic_action(th, 0.4, 0.7)
    errs = []
    for km in (64, 2000):
        m = solve_full_modes(p, th, ep, km, ModeVector(th, np.zeros(km)))
        errs.append(abs(action_functional(p, th, ep, m) - exact))
        assert action_functional(p, th, ep, m, harmonic_tail=True) == pytest.approx(exact, abs=1e-6)
    # plain truncation converges like 1/kmax
    assert errs[0] / errs[1] == pytest.approx(2000 / 64, rel=0.05)
    assert action_functional(p, th, Endpoints.from_qq(0, 0), ModeVector(th, np.zeros(5))) == 0.0


def test_full_modes_harmonic_one_step():
    p = BarrierParams({}, 0.01)
    th = 1.7
    ep = Endpoints.from_rz(0.4, -0.3)
    m = solve_full_modes(p, th, ep, 16, ModeVector(th, np.zeros(16)), max_iter=2)
    k = np.arange(1, 17)
    np.testing.assert_allclose(m.amplitudes, mode_source(th, ep, k) / mode_eigenvalue(th, k), rtol=1e-12)


def test_full_modes_reduce_to_cubic_branches():
    th = theta_from_lambda1(0.5 * critical_point(P5).lambda_c)
    ep = Endpoints.from_rz(0.0, 0.0)
    bs = solve_cubic(P5, th, 0.0)
    assert len(bs) == 3
    found = []
    for s in bs.solutions:
        m = solve_full_modes(P5, th, ep, 32, initial_modes(P5, th, ep, s.Q, 32))
        Qf = mode_to_amplitude(P5, th, m.amplitudes[0])
        assert abs(Qf - s.Q) <= 5 * P5.epsilon ** (2 / 3)
        found.append(Qf)
    # each seed stays in its own basin
    assert np.argmin(np.abs(np.array(found) - bs.solutions[1].Q)) == 1
    assert sorted(found) == found
