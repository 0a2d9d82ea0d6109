import cmath
import math
import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from discheb.exact_eval import PolyTriple
from discheb.regime import (
    ConfigError,
    Regime,
    Thresholds,
    airy_residuals,
    bessel_constants,
    classify,
    dphase_dt,
    fold,
    gamma_neg_constant,
    phase_t,
    psi,
    reduced_phase,
    reduced_phase_neg,
    saddle_t0,
    saddles_u,
    saddles_v,
    saddles_w,
    scaled_params,
    solve_airy_constants,
    solve_kummer_constants,
)
from discheb.values import DegenerateInputError, DomainError

mpmath.mp.dps = 30


# ------------------------------------------------------------ independent mpmath oracle


def mp_t0(w, b):
    # the unsimplified saddle formula
    return (2 * w - 1 + mpmath.sqrt(1 + 4 * b * b * (w - 1) * w)) / (2 * (1 + b) * w)


def mp_F(w, a, b):
    t = mp_t0(w, b)
    return (b * mpmath.log(1 - t) + (1 - b) * mpmath.log(t) + a * mpmath.log(w)
            - a * mpmath.log(1 - w) + b * mpmath.log(1 - (1 - t) * w))


def mp_kummer(a, b):
    a, b = mpmath.mpf(a), mpmath.mpf(b)
    disc = mpmath.sqrt(b * b - 4 * a + 4 * a * a)
    wp, wm = (b + disc) / (2 * b), (b - disc) / (2 * b)
    dF = mp_F(wp, a, b) - mp_F(wm, a, b)

    def g(eta):
        up = (eta + mpmath.sqrt(eta * eta + 4 * a * eta)) / (2 * eta)
        return 2 * a * mpmath.log((1 - up) / up) + eta * mpmath.sqrt(1 + 4 * a / eta) - dF

    eta = mpmath.findroot(g, (-4 * b * b, -4 * a * (1 + mpmath.mpf(10) ** -20)), solver="illinois")
    up = (eta + mpmath.sqrt(eta * eta + 4 * a * eta)) / (2 * eta)
    gamma = mp_F(wm, a, b) - (a * mpmath.log(up) - a * mpmath.log(1 - up) + eta * up)
    return eta, gamma


# ------------------------------------------------------------ scaled params / classify


def test_scaled_params_examples():
    s = scaled_params(PolyTriple(10, 50, 10000))
    assert (s.a, s.b, s.rho) == (0.005, 0.001, 5000.0)
    # rho = x capN / n^2 = a / b^2
    assert scaled_params(PolyTriple(100, 1, 10000)).rho == pytest.approx(1.0, rel=1e-15)
    assert scaled_params(PolyTriple(100, 25, 10000)).rho == pytest.approx(25.0, rel=1e-15)
    s = scaled_params(PolyTriple(37, 11, 4321))
    assert s.rho == pytest.approx(s.a / s.b**2, rel=1e-14)
    with pytest.raises(DegenerateInputError):
        scaled_params(PolyTriple(0, 1, 10))


def test_classify_examples():
    assert classify(PolyTriple(10, 2500, 10000)) is Regime.BesselSmallB
    # rho = 0.022 < rho_lo with n^2/capN = 9 < eta_n_min: the series is itself asymptotic
    assert classify(PolyTriple(300, Fraction(1, 5), 10000)) is Regime.SeriesAsymptotic
    # rho = 0.56 lies in the Airy band but x = 5 is below x_hi
    assert classify(PolyTriple(300, 5, 10000)) is Regime.ExactFallback
    assert classify(PolyTriple(400, 160, 10000)) is Regime.AirySmallB


def test_classify_branches():
    t = Thresholds()
    assert classify(PolyTriple(50, -3, 1000), t) is Regime.GammaNegSmallB
    assert classify(PolyTriple(500, -3, 1000), t) is Regime.ExactFallback
    assert classify(PolyTriple(500, 100, 1000), t) is Regime.KummerFixedB
    assert classify(PolyTriple(10, 20, 10000), t) is Regime.SeriesAsymptotic  # rho large, x small
    assert classify(PolyTriple(400, 20, 10000), t) is Regime.ExactFallback  # Airy band, x small
    assert classify(PolyTriple(900, 2, 10000), t) is Regime.KummerSmallB
    assert classify(PolyTriple(0, 5, 10), t) is Regime.ExactFallback
    assert classify(PolyTriple(1, 5000, 10000), t) is Regime.SeriesAsymptotic
    assert classify(PolyTriple(900, 0, 10000), t) is Regime.SeriesAsymptotic


def test_classify_folds_by_symmetry():
    p = PolyTriple(10, 7500, 10000)
    q, sign = fold(p)
    assert q.x == 2500 and sign == 1
    assert classify(p) is classify(q)
    assert fold(PolyTriple(3, 9, 10))[1] == -1
    # beyond the support folds to negative x
    assert classify(PolyTriple(50, 1003, 1000)) is Regime.GammaNegSmallB


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 10**6).flatmap(lambda N: st.tuples(st.integers(1, N), st.integers(-N, 2 * N), st.just(N))))
def test_classify_total_and_deterministic(t):
    n, x, capN = t
    p = PolyTriple(n, x, capN)
    r = classify(p)
    assert isinstance(r, Regime)
    assert classify(p) is r


def test_thresholds_file(tmp_path):
    f = tmp_path / "t.cfg"
    f.write_text("# cutoffs\nrho_lo = 0.1\nx_hi=12\n\n")
    t = Thresholds.from_file(f)
    assert t.rho_lo == 0.1 and t.x_hi == 12 and t.b_hi == 0.1
    assert Thresholds.from_text(t.to_text()) == t
    for bad in ("rho_lo=abc", "nonsense=1", "rho_lo", "rho_lo=30", "x_hi=-1"):
        with pytest.raises(ConfigError):
            Thresholds.from_text(bad)


# ------------------------------------------------------------ saddles


@settings(max_examples=200, deadline=None)
@given(st.floats(-2, 0.5), st.floats(0.001, 0.999))
def test_w_saddles_sum_to_one(a, b):
    wp, wm = saddles_w(a, b)
    assert abs(wp + wm - 1) < 1e-14 * max(1, abs(wp))


def test_w_saddle_examples():
    assert saddles_w(0, 0.3) == (1, 0)
    wp, wm = saddles_w(0.25, 0.01)
    assert wp.imag != 0 and wp.real == pytest.approx(0.5) and wm == wp.conjugate()


def test_t0_examples_and_residual():
    assert saddle_t0(1, 0.2) == pytest.approx(1 / 1.2, rel=1e-15)
    for a, b in [(0.01, 0.3), (0.2, 0.1), (-0.3, 0.4), (0.45, 0.9)]:
        wp, wm = saddles_w(a, b)
        disc = cmath.sqrt(b * b - 4 * a + 4 * a * a)
        tp = (2 - 2 * a - b * b + b * disc) / (2 * (1 - a) * (1 + b))
        tm = (2 - 2 * a - b * b - b * disc) / (2 * (1 - a) * (1 + b))
        assert abs(saddle_t0(wp, b) - tp) < 1e-13 and abs(saddle_t0(wm, b) - tm) < 1e-13
        for w in (wp, wm, 0.3 + 0.2j, -2.0):
            assert abs(dphase_dt(saddle_t0(w, b), w, b)) < 1e-12
            assert abs(saddle_t0(w, b) - complex(mp_t0(mpmath.mpc(w), b))) < 1e-14
    # b -> 0: t0 = 1 - b + O(b^2)
    for b in (1e-2, 1e-3, 1e-4):
        assert abs(saddle_t0(0.3, b) - (1 - b)) < 5 * b * b


def test_reduced_phase_matches_two_variable_phase():
    for a, b, w in [(0.1, 0.2, 0.3 + 0.1j), (0.01, 0.5, 0.7 - 0.2j)]:
        assert abs(reduced_phase(w, a, b) - phase_t(saddle_t0(w, b), w, a, b)) < 1e-14


def test_v_saddles():
    vp, vm = saddles_v(0.25, 0.01)
    assert (vp * vm).real == pytest.approx(0.0001 / 0.1875, rel=1e-12)
    assert vp == vm.conjugate()
    assert saddles_v(0.5, 0.1)[0].real == pytest.approx(0.02, rel=1e-14)
    assert abs(saddles_v(0.25, 1e-6)[0]) < 1e-5
    with pytest.raises(DomainError):
        saddles_v(0.01, 0.3)


@settings(max_examples=100, deadline=None)
@given(st.floats(1e-4, 0.5), st.floats(1e-3, 0.99))
def test_v_saddle_product(a, b):
    if 4 * a * (1 - a) <= b * b * 1.0001:
        return
    vp, vm = saddles_v(a, b)
    assert abs(vp * vm / (b * b / (a * (1 - a))) - 1) < 1e-12


# ------------------------------------------------------------ Kummer constants


def test_kummer_constants_match_mpmath():
    for a, b in [(1e-4, 0.1), (1e-6, 0.1), (2e-4, 0.05)]:
        k = solve_kummer_constants(a, b)
        eta, gamma = mp_kummer(a, b)
        assert k.eta == pytest.approx(float(eta), rel=1e-10)
        assert k.gamma == pytest.approx(float(gamma), rel=1e-10)


def test_kummer_small_b_examples():
    r1 = abs(solve_kummer_constants(1e-4, 0.1).eta + 0.01) / 0.01
    r2 = abs(solve_kummer_constants(1e-6, 0.1).eta + 0.01) / 0.01
    assert r1 < 0.1 and r2 < r1


def test_kummer_defining_relation_and_u_sum():
    for a, b in [(1e-4, 0.1), (0.06, 0.5), (0.125, 0.5), (0.4, 0.3), (0.01, 0.02)]:
        k = solve_kummer_constants(a, b)
        up, um = saddles_u(k.eta, a)
        wp, wm = saddles_w(a, b)
        assert abs(up + um - 1) < 1e-13
        assert abs(reduced_phase(wm, a, b) - (psi(up, a, k.eta) + k.gamma)) < 1e-12
        assert abs(reduced_phase(wp, a, b) - (psi(um, a, k.eta) + k.gamma)) < 1e-12
        assert k.eta < 0
        assert k.complex_saddles == (b * b < 4 * a * (1 - a))


def test_kummer_a_zero():
    k = solve_kummer_constants(0.0, 0.2)
    wp, wm = saddles_w(0.0, 0.2)
    assert k.eta == pytest.approx((reduced_phase(wp, 0, 0.2) - reduced_phase(wm, 0, 0.2)).real)


# ------------------------------------------------------------ Airy constants


def test_airy_examples():
    a = 0.01
    assert abs(solve_airy_constants(a, math.sqrt(4 * a * (1 - a))).zeta) < 1e-6
    assert solve_airy_constants(1e-4, 0.1).zeta > 0
    assert solve_airy_constants(0.25, 0.01).zeta < 0


def test_airy_residuals_small():
    rng = random.Random(7)
    for _ in range(200):
        a, b = rng.uniform(1e-4, 0.49), rng.uniform(1e-3, 0.95)
        c = solve_airy_constants(a, b)
        assert max(airy_residuals(c, a, b)) < 1e-12
        assert (c.zeta > 0) == (b * b > 4 * a * (1 - a))


def test_airy_matches_mpmath_real_case():
    a, b = 1e-3, 0.2
    c = solve_airy_constants(a, b)
    disc = mpmath.sqrt(b * b - 4 * a + 4 * a * a)
    fp, fm = mp_F((b + disc) / (2 * b), a, b), mp_F((b - disc) / (2 * b), a, b)
    assert c.zeta == pytest.approx(float((mpmath.mpf(3) / 4 * (fm - fp)) ** (mpmath.mpf(2) / 3)), rel=1e-10)
    assert c.A == pytest.approx(float((fp + fm) / 2), rel=1e-12)


# ------------------------------------------------------------ Bessel constants


def test_bessel_constants_against_closed_forms():
    a, b = 0.25, 0.01
    c = bessel_constants(a, b)
    A, B = mpmath.mpf(a), mpmath.mpf(b)
    g = mpmath.log((1 - B) / (1 + B)) / 2 + B * mpmath.log(B * B / (1 - B * B)) / 2
    assert abs(c.gamma - float(g)) < 1e-15
    s = mpmath.sqrt(4 * A - 4 * A * A - B * B)
    m = -((1 - B) * mpmath.atan(B * s / (2 - 2 * A - B * B)) - A * mpmath.atan(B * s / (2 * A - 2 * A * A - B * B))
          - 2 * B * mpmath.atan(s / (2 + B - 2 * A))) / 2
    assert c.m == pytest.approx(float(m), rel=1e-12)
    assert c.m == pytest.approx(b * math.atan(math.sqrt(a / (1 - a))), rel=1e-4)
    assert c.m / b == pytest.approx(math.pi / 6, rel=1e-4)


def test_bessel_m_uses_obtuse_angle_when_needed():
    # 2a - 2a^2 - b^2 < 0 puts the middle angle in (pi/2, pi)
    a, b = 0.02, 0.25
    c = bessel_constants(a, b)
    A, B = mpmath.mpf(a), mpmath.mpf(b)
    s = mpmath.sqrt(4 * A - 4 * A * A - B * B)
    m = -((1 - B) * mpmath.atan2(B * s, 2 - 2 * A - B * B) - A * mpmath.atan2(B * s, 2 * A - 2 * A * A - B * B)
          - 2 * B * mpmath.atan2(s, 2 + B - 2 * A)) / 2
    assert c.m == pytest.approx(float(m), rel=1e-12)


def test_bessel_domain():
    with pytest.raises(DomainError):
        bessel_constants(0.01, 0.3)


# ------------------------------------------------------------ a < 0


def test_gamma_neg_constant():
    for a, b in [(-0.001, 0.05), (-0.01, 0.1), (-0.5, 0.3)]:
        g = gamma_neg_constant(a, b)
        _, wm = saddles_w(a, b)
        assert wm.real < 0 and wm.imag == 0
        assert abs(reduced_phase_neg(wm.real, a, b).real - a * math.log(-a) + a - g.gamma) < 1e-12
    # 30-digit independent value
    a, b = mpmath.mpf("-0.01"), mpmath.mpf("0.1")
    disc = mpmath.sqrt(b * b - 4 * a + 4 * a * a)
    w = (b - disc) / (2 * b)
    t = mp_t0(w, b)
    ft = (b * mpmath.log(1 - t) + (1 - b) * mpmath.log(t) + a * mpmath.log(-w)
          - a * mpmath.log(1 - w) + b * mpmath.log(1 - (1 - t) * w))
    ref = ft - (a * mpmath.log(-a) - a)
    assert gamma_neg_constant(-0.01, 0.1).gamma == pytest.approx(float(ref), rel=1e-12)
    with pytest.raises(DomainError):
        gamma_neg_constant(0.01, 0.1)
