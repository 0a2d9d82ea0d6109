"""Leading-order uniform approximations of t_n(x, capN+1).

Every expansion has the shape

    t_n(x, capN+1) ~ sign * exp(L) * [c0 * K(z) + d0 * K'(z)]

with a log-gamma prefactor L, a model kernel K (regularized Kummer, Airy or
Bessel J) and leading coefficients c0, d0 taken from the saddle values of the
transformed amplitude h0(u, tau). Only the l = 0 coefficients are computed.

The small-b amplitudes use tau = b, the peak of the tau^n e^(-N tau) weight,
where dt/dtau has the closed form

    dt/dtau = sqrt(t0 (1 - t0) (1 - (1 - t0) w) / (b sqrt(D)))

with D = 1 + 4 b^2 (w - 1) w. The fixed-b amplitude uses tau = 0 instead, which
drops the factor 1/b and doubles the radicand.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from . import regime as rg
from .exact_eval import PolyTriple, eval_exact_series, hypergeometric_partial_sum, to_signed_log
from .regime import (
    AiryConstants,
    BesselConstants,
    GammaNegConstants,
    KummerConstants,
    Regime,
    RegimeConstants,
    Thresholds,
)
from .special_functions import airy, bessel_j01, kummer_reg, log_gamma
from .values import BranchError, DomainError, SignedLogValue, signed_log_sum

# Overall orientation of each expansion. The square-root branches of dw/du and
# dt/dtau fix h0 only up to a global sign, so the sign was fixed once against
# the exact oracle at the listed (n, x, capN) and is never changed per call.
CALIBRATION = {
    Regime.KummerSmallB: (-1, (125, 5, 1000)),
    Regime.KummerFixedB: (1, (100, 25, 200)),
    Regime.AirySmallB: (-1, (100, 5, 2000)),
    Regime.BesselSmallB: (-1, (12, 125, 500)),
    Regime.GammaNegSmallB: (1, (63, -3, 1000)),
}

# below these sizes the two saddle equations nearly coincide
ZETA_DEGENERATE = 1e-4
U_SPLIT_DEGENERATE = 1e-4
# distance kept from a = 1/2, where sqrt(1-2a) factors vanish
HALF_OFFSET = 1e-9


@dataclass(frozen=True)
class LeadingCoeffs:
    c0: float
    d0: float | None = None
    notes: tuple[str, ...] = field(default=(), compare=False)


@dataclass(frozen=True)
class ApproxResult:
    """An approximation with everything needed to recompute it.

    ``value`` equals ``prefactor`` times the weighted sum of ``kernel_values``
    with the weights in ``kernel_weights``.
    """

    value: SignedLogValue
    regime: Regime
    constants: RegimeConstants | None
    coeffs: LeadingCoeffs | None
    kernel_values: dict[str, SignedLogValue]
    kernel_weights: dict[str, float]
    prefactor: SignedLogValue
    diagnostics: tuple[str, ...] = ()


@dataclass(frozen=True)
class SeriesPartial:
    value: SignedLogValue
    first_omitted_ratio: float
    terms_used: int


def recombine(result: ApproxResult) -> SignedLogValue:
    """Rebuild the value from the recorded prefactor, kernels and weights."""
    kernel = signed_log_sum(
        result.kernel_values[k].scale(w) for k, w in result.kernel_weights.items() if w != 0
    )
    return result.prefactor * kernel


# ---------------------------------------------------------------- amplitude pieces


def _tau_factor(w: complex, b: float, tau_zero: bool = False) -> complex:
    t, omt = rg.saddle_t0(w, b), rg.one_minus_t0(w, b)
    sd = cmath.sqrt(1 + 4 * b * b * (w - 1) * w)
    if tau_zero:
        return cmath.sqrt(2 * t * omt * (1 - omt * w) / sd)
    return cmath.sqrt(t * omt * (1 - omt * w) / (b * sd))


def _as_real(z: complex, what: str) -> float:
    if abs(z.imag) > 1e-8 * max(1.0, abs(z)):
        raise BranchError(f"{what} has imaginary part {z.imag:.3e} (value {z})")
    return z.real


def _kummer_saddle_values(a: float, b: float, k: KummerConstants, tau_zero: bool):
    up, um = rg.saddles_u(k.eta, a)
    wp, wm = rg.saddles_w(a, b)
    dwdu = cmath.sqrt(k.eta**2 * (1 - a) * (1 - 2 * a) * (2 * um - 1) / (b**4 * (2 * wp - 1)))
    # u+ corresponds to w- and u- to w+
    h_plus = (up - 1) / (wm - 1) * dwdu * _tau_factor(wm, b, tau_zero)
    h_minus = (um - 1) / (wp - 1) * dwdu * _tau_factor(wp, b, tau_zero)
    return up, um, h_plus, h_minus


def _kummer_system(a: float, b: float, k: KummerConstants, tau_zero: bool):
    up, um, hp, hm = _kummer_saddle_values(a, b, k, tau_zero)
    b0 = (hp - hm) / (up - um)
    a0 = hp - b0 * up
    cond = float(np.linalg.cond(np.array([[1, up], [1, um]], dtype=complex)))
    return _as_real(a0, "Kummer a0"), _as_real(b0, "Kummer b0"), cond


def _u_split(a: float, b: float) -> float:
    """(u+ - u-)^2 = 1 + 4a/eta, real on both sides of coalescence."""
    k = rg.solve_kummer_constants(a, b)
    return 1 + 4 * a / k.eta


def _shift_off_curve(a: float, b: float, s: float) -> float:
    """The a' <= 1/2 with b^2 - 4a'(1-a') = s."""
    return 0.5 * (1 - math.sqrt(max(0.0, 1 - (b * b - s))))


def _bridge(a: float, b: float, key, coeffs, tol: float):
    """Interpolate (c0, d0) linearly in ``key`` between points on either side of coalescence."""
    delta = b * b - 4 * a * (1 - a)
    s = max(1e-3 * b * b, 2 * abs(delta))
    for _ in range(60):
        a_real, a_cplx = _shift_off_curve(a, b, s), _shift_off_curve(a, b, -s)
        if 0 < a_real and a_cplx < 0.5:
            k1, k2 = key(a_real), key(a_cplx)
            if abs(k1) >= 2 * tol and abs(k2) >= 2 * tol:
                break
        s *= 2
    else:
        raise DomainError(f"could not step away from coalescence at a={a}, b={b}")
    c1, c2 = coeffs(a_real), coeffs(a_cplx)
    k0 = key(a)
    lam = (k0 - k1) / (k2 - k1)
    c0 = (1 - lam) * c1[0] + lam * c2[0]
    d0 = (1 - lam) * c1[1] + lam * c2[1]
    note = f"near coalescence: interpolated between a={a_real!r} and a={a_cplx!r}"
    return c0, d0, note


def _kummer_coeffs(a: float, b: float, k: KummerConstants, tau_zero: bool) -> LeadingCoeffs:
    notes = []
    split = 1 + 4 * a / k.eta if a > 0 else 1.0
    if abs(split) < U_SPLIT_DEGENERATE:
        c0, d0, note = _bridge(
            a, b, lambda aa: _u_split(aa, b),
            lambda aa: _kummer_system(aa, b, rg.solve_kummer_constants(aa, b), tau_zero)[:2],
            U_SPLIT_DEGENERATE,
        )
        notes.append(note)
    else:
        c0, d0, cond = _kummer_system(a, b, k, tau_zero)
        notes.append(f"2x2 condition number {cond:.6g}")
    if tau_zero:
        c0, d0 = c0 * math.sqrt(math.pi), d0 * math.sqrt(math.pi)
    return LeadingCoeffs(c0, d0, tuple(notes))


def leading_coeffs_kummer(a: float, b: float, k: KummerConstants) -> LeadingCoeffs:
    """c0 = a0(b), d0 = b0(b) from h0(u+-, b) = a0 + b0 u+-."""
    return _kummer_coeffs(a, b, k, tau_zero=False)


def leading_coeffs_fixed_b(a: float, b: float, k: KummerConstants) -> LeadingCoeffs:
    """Fixed-b coefficients: the tau = 0 saddle system times Gamma(1/2) = sqrt(pi)."""
    return _kummer_coeffs(a, b, k, tau_zero=True)


def airy_saddle_values(a: float, b: float, c: AiryConstants) -> tuple[complex, complex]:
    """h0(+sqrt(zeta), b) and h0(-sqrt(zeta), b)."""
    wp, wm = rg.saddles_w(a, b)
    sz = cmath.sqrt(c.zeta)
    dwdu = cmath.sqrt(2 * sz * wp * (1 - wp) * (1 - 2 * a) / (b * b * (2 * wp - 1)))
    return dwdu * _tau_factor(wp, b) / (wp - 1), dwdu * _tau_factor(wm, b) / (wm - 1)


def _airy_system(a: float, b: float, c: AiryConstants) -> tuple[float, float]:
    hp, hm = airy_saddle_values(a, b, c)
    sz = cmath.sqrt(c.zeta)
    return _as_real((hp + hm) / 2, "Airy a0"), _as_real((hp - hm) / (2 * sz), "Airy b0")


def leading_coeffs_airy(a: float, b: float, c: AiryConstants) -> LeadingCoeffs:
    """a0 + b0 (+-sqrt(zeta)) = h0(+-sqrt(zeta), b); bridged across zeta = 0."""
    if abs(c.zeta) < ZETA_DEGENERATE:
        c0, d0, note = _bridge(
            a, b, lambda aa: rg.solve_airy_constants(aa, b).zeta,
            lambda aa: _airy_system(aa, b, rg.solve_airy_constants(aa, b)),
            ZETA_DEGENERATE,
        )
        return LeadingCoeffs(c0, d0, (note,))
    c0, d0 = _airy_system(a, b, c)
    return LeadingCoeffs(c0, d0)


def bessel_h0_closed_form(a: float, b: float, m: float) -> complex:
    """h0(i, 0) from the tau = 0 closed form with the phase Delta."""
    s = math.sqrt(4 * a - 4 * a * a - b * b)
    _, v = rg.saddles_v(a, b)  # v- pairs with u = i
    delta = 2 * math.atan(math.sqrt(a / (1 - a))) - math.sqrt(a / (1 - a))
    return -(1 - a) * v / b * cmath.sqrt(2 * (1 - 2 * a) * m / (b * s * (1 - v))) * cmath.exp(1j * delta)


def bessel_h0_at_b(a: float, b: float, m: float) -> complex:
    """h0(i, b) = i/(v(1-v)) dt/dtau dv/du at v = v-, principal square roots."""
    s = math.sqrt(4 * a - 4 * a * a - b * b)
    _, v = rg.saddles_v(a, b)
    t = (1 - a * v) / (1 + b)
    dtdtau = cmath.sqrt(t * (1 - t) * (t + v - 1) / (b * (1 - 2 * a) * v))
    dvdu = cmath.sqrt(-2 * m * v * v * (1 - v) * (1 - 2 * a) / (b * s))
    return 1j / (v * (1 - v)) * dtdtau * dvdu


def leading_coeffs_bessel(a: float, b: float, m: float) -> LeadingCoeffs:
    """c0 = Re h0(i, b), d0 = -Im h0(i, b), using h0(-i, .) = conj h0(i, .).

    The tau = 0 closed form is kept as a cross-check; its ratio to the tau = b
    value is reported in the notes.
    """
    h = bessel_h0_at_b(a, b, m)
    h_closed = bessel_h0_closed_form(a, b, m)
    note = f"h0(i,b)/h0(i,0) = {h / h_closed:.6g}"
    return LeadingCoeffs(h.real, -h.imag, (note,))


def leading_coeff_gamma_neg(a: float, b: float, g: GammaNegConstants | None = None) -> LeadingCoeffs:
    """c0 = h0(a, b) = a/(w- - 1) * dt/dtau * dw/du at the saddle w-."""
    if not a < 0:
        raise DomainError(f"need a < 0, got a={a}")
    _, wm = rg.saddles_w(a, b)
    disc = math.sqrt(b * b - 4 * a + 4 * a * a)
    dwdu = math.sqrt((1 - a) * (1 - 2 * a) / (b**3 * disc))
    h = a / (wm - 1) * _tau_factor(wm, b) * dwdu
    return LeadingCoeffs(_as_real(h, "a < 0 coefficient"))


def leading_coeffs(regime: Regime, a: float, b: float, consts: RegimeConstants) -> LeadingCoeffs:
    if regime is Regime.KummerSmallB:
        return leading_coeffs_kummer(a, b, consts)
    if regime is Regime.KummerFixedB:
        return leading_coeffs_fixed_b(a, b, consts)
    if regime is Regime.AirySmallB:
        return leading_coeffs_airy(a, b, consts)
    if regime is Regime.BesselSmallB:
        return leading_coeffs_bessel(a, b, consts.m)
    if regime is Regime.GammaNegSmallB:
        return leading_coeff_gamma_neg(a, b, consts)
    raise DomainError(f"regime {regime} has no leading coefficients")


# ---------------------------------------------------------------- assembly


def _log_gamma_ratio(n: int, capN: int) -> float:
    """ln Gamma(n+N+2) - ln Gamma(N-n+1)."""
    return log_gamma(n + capN + 2) - log_gamma(capN - n + 1)


def _small_b_exponent(n: int, capN: int, const: float) -> float:
    """n - n ln b + N const, summed as one compensated group."""
    b = n / capN
    return math.fsum([n, -n * math.log(b), capN * const])


def _check_constants(r: Regime, consts) -> None:
    expected = {
        Regime.KummerSmallB: KummerConstants,
        Regime.KummerFixedB: KummerConstants,
        Regime.AirySmallB: AiryConstants,
        Regime.BesselSmallB: BesselConstants,
        Regime.GammaNegSmallB: GammaNegConstants,
    }[r]
    if not isinstance(consts, expected):
        raise DomainError(f"{r} needs {expected.__name__}, got {type(consts).__name__}")


def approx(p: PolyTriple, r: Regime, consts: RegimeConstants, coeffs: LeadingCoeffs) -> ApproxResult:
    """Assemble the leading-order approximation for regime r.

    ``consts`` and ``coeffs`` must belong to the folded parameters (x replaced
    by capN - x when x > capN/2); the fold sign is applied here.
    """
    if r in (Regime.SeriesAsymptotic, Regime.ExactFallback):
        raise DomainError(f"{r} is not assembled from mapping constants")
    _check_constants(r, consts)
    q, fold_sign = rg.fold(p)
    n, capN = q.n, q.capN
    x = float(q.x)
    cal = CALIBRATION[r][0]
    lnN = math.log(capN)
    kv: dict[str, SignedLogValue] = {}
    kw: dict[str, float] = {}
    diags: list[str] = list(coeffs.notes)

    if r in (Regime.KummerSmallB, Regime.KummerFixedB):
        kp = kummer_reg(x + 1, consts.eta * capN)
        if kp.precision_degraded:
            diags.append("Kummer kernel precision degraded; " + "; ".join(kp.notes))
        kv = {"M": kp.m_val, "M_prime": kp.m_prime}
        kw = {"M": coeffs.c0, "M_prime": coeffs.d0}
        if r is Regime.KummerSmallB:
            sign = (-1) ** (n + 1)
            logp = _log_gamma_ratio(n, capN) - (n + 1) * lnN + _small_b_exponent(n, capN, consts.gamma)
        else:
            sign = (-1) ** n
            logp = _log_gamma_ratio(n, capN) - log_gamma(n + 1) - 0.5 * lnN + capN * consts.gamma
    elif r is Regime.AirySmallB:
        z = capN ** (2 / 3) * consts.zeta
        q4 = airy(z)
        s1, s2 = capN ** (-1 / 3), capN ** (-2 / 3)
        if q.x_is_integer:
            # sin(x pi) vanishes identically: the Bi branch is dropped, not evaluated to zero
            cos_x = (-1) ** int(q.x)
            kv = {"Ai": q4.ai, "Ai_prime": q4.ai_prime}
            kw = {"Ai": cos_x * coeffs.c0 * s1, "Ai_prime": -cos_x * coeffs.d0 * s2}
        else:
            diags.append("non-integer x in the Airy regime is experimental")
            cos_x, sin_x = math.cos(math.pi * x), math.sin(math.pi * x)
            kv = {"Ai": q4.ai, "Ai_prime": q4.ai_prime, "Bi": q4.bi, "Bi_prime": q4.bi_prime}
            kw = {
                "Ai": cos_x * coeffs.c0 * s1,
                "Ai_prime": -cos_x * coeffs.d0 * s2,
                "Bi": sin_x * coeffs.c0 * s1,
                "Bi_prime": -sin_x * coeffs.d0 * s2,
            }
        sign = (-1) ** n
        logp = _log_gamma_ratio(n, capN) - (n + 1) * lnN + _small_b_exponent(n, capN, consts.A)
    elif r is Regime.BesselSmallB:
        j0, j1 = bessel_j01(2 * capN * consts.m)
        kv = {"J0": j0, "J1": j1}
        kw = {"J0": coeffs.c0, "J1": coeffs.d0}
        sign = (-1) ** (n + 1)
        logp = _log_gamma_ratio(n, capN) - (n + 1) * lnN + _small_b_exponent(n, capN, consts.gamma)
    else:
        if x >= 1:
            raise DomainError("the a < 0 expansion needs 1 - x > 0")
        kv = {"one": SignedLogValue(1, 0.0)}
        kw = {"one": coeffs.c0}
        sign = (-1) ** n
        logp = (
            _log_gamma_ratio(n, capN)
            - log_gamma(1 - x)
            - (x + n + 1) * lnN
            + _small_b_exponent(n, capN, consts.gamma)
        )

    prefactor = SignedLogValue(sign * cal * fold_sign, logp)
    result = ApproxResult(SignedLogValue.zero(), r, consts, coeffs, kv, kw, prefactor, tuple(diags))
    value = recombine(result)
    return ApproxResult(value, r, consts, coeffs, kv, kw, prefactor, tuple(diags))


def approx_series_partial(p: PolyTriple, K: int) -> SeriesPartial:
    """K-term truncation of the hypergeometric sum, scaled by (-1)^n (capN+1-n)_n.

    The first omitted term relative to the leading term 1 is the error
    estimate; K > n gives the full, exact sum.
    """
    if K < 1:
        raise DomainError(f"need K >= 1, got {K}")
    k_used = min(K, p.n + 1)
    partial, omitted = hypergeometric_partial_sum(p, k_used)
    pre = (-1) ** p.n * math.prod(range(p.capN + 1 - p.n, p.capN + 1))
    return SeriesPartial(to_signed_log(pre * partial), float(abs(omitted)), k_used)


def _domain_point(regime: Regime, a: float, b: float, diags: list[str]) -> float:
    """Apply the a = 1/2 guard; returns the a actually used."""
    if regime in (Regime.KummerSmallB, Regime.KummerFixedB, Regime.AirySmallB, Regime.BesselSmallB):
        if a > 0.5 - HALF_OFFSET:
            diags.append(f"a = {a!r} moved to 1/2 - {HALF_OFFSET} (one-sided limit)")
            return 0.5 - HALF_OFFSET
    return a


def approximate(
    p: PolyTriple,
    thresholds: Thresholds | None = None,
    regime: Regime | None = None,
    terms: int = 2,
) -> ApproxResult:
    """Classify (unless ``regime`` is given), solve, and assemble in one call.

    ExactFallback returns the exact value; SeriesAsymptotic returns the
    ``terms``-term truncation.
    """
    r = regime or rg.classify(p, thresholds)
    if r is Regime.ExactFallback:
        v = to_signed_log(eval_exact_series(p))
        return ApproxResult(v, r, None, None, {"exact": v}, {"exact": 1.0}, SignedLogValue(1, 0.0), ("routed to exact oracle",))
    if r is Regime.SeriesAsymptotic:
        s = approx_series_partial(p, terms)
        note = f"{s.terms_used} terms, first omitted term ratio {s.first_omitted_ratio!r}"
        return ApproxResult(s.value, r, None, None, {"partial_sum": s.value}, {"partial_sum": 1.0}, SignedLogValue(1, 0.0), (note,))
    q, _ = rg.fold(p)
    s = rg.scaled_params(q)
    diags: list[str] = []
    a = _domain_point(r, s.a, s.b, diags)
    consts = rg.solve_constants(r, a, s.b)
    coeffs = leading_coeffs(r, a, s.b, consts)
    res = approx(p, r, consts, coeffs)
    if diags:
        res = ApproxResult(res.value, res.regime, res.constants, res.coeffs, res.kernel_values,
                           res.kernel_weights, res.prefactor, tuple(diags) + res.diagnostics)
    return res
