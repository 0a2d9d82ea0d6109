"""Special-function kernels used by the asymptotic approximants.

Airy and Bessel values come from scipy.special (AMOS/Cephes); the exponentially
scaled Airy routine keeps the log magnitude finite for large positive
arguments. The regularized Kummer function is summed here directly, with a
transformation for negative arguments and an elevated-precision rerun when the
float sum loses too many digits to cancellation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath
from scipy import special as sp

from .values import DomainError, SignedLogValue

# Cancellation amplification beyond which the float series is not trusted.
AMPLIFICATION_LIMIT = 1e6
# |z| beyond which the large-argument expansion is tried for non-integer alpha.
ASYMPTOTIC_SWITCH = 30.0
_MAX_TERMS = 100_000


@dataclass(frozen=True)
class AiryQuad:
    ai: SignedLogValue
    ai_prime: SignedLogValue
    bi: SignedLogValue
    bi_prime: SignedLogValue


@dataclass(frozen=True)
class KummerPair:
    """Regularized M(alpha, 1, z) and its z-derivative, plus evaluation notes."""

    m_val: SignedLogValue
    m_prime: SignedLogValue
    precision_degraded: bool = False
    method: str = "series"
    notes: tuple[str, ...] = field(default=())


def airy(z: float) -> AiryQuad:
    """Ai, Ai', Bi, Bi' at real z in signed-log form."""
    z = float(z)
    if not math.isfinite(z):
        raise DomainError(f"airy argument must be finite, got {z}")
    if z > 0:
        # airye scales Ai by exp(xi) and Bi by exp(-xi), xi = (2/3) z^1.5
        eai, eaip, ebi, ebip = sp.airye(z)
        xi = 2.0 / 3.0 * z * math.sqrt(z)
    else:
        # oscillatory side needs no scaling (airye gives NaN for Ai here)
        eai, eaip, ebi, ebip = sp.airy(z)
        xi = 0.0

    def wrap(v, shift):
        s = SignedLogValue.from_float(float(v))
        return SignedLogValue.from_parts(s.sign, s.log_abs + shift)

    return AiryQuad(wrap(eai, -xi), wrap(eaip, -xi), wrap(ebi, xi), wrap(ebip, xi))


def bessel_j01(z: float) -> tuple[SignedLogValue, SignedLogValue]:
    """J0(z) and J1(z) for z >= 0."""
    z = float(z)
    if not z >= 0:
        raise DomainError(f"bessel_j01 needs z >= 0, got {z}")
    return SignedLogValue.from_float(float(sp.j0(z))), SignedLogValue.from_float(float(sp.j1(z)))


def log_gamma(x: float) -> float:
    """ln Gamma(x) for x > 0."""
    if not x > 0:
        raise DomainError(f"log_gamma needs x > 0, got {x}")
    return math.lgamma(x)


def _series_float(p: float, c: float, z: float):
    """Sum_s (p)_s/(c)_s z^s/s! in floats; returns (sum, sum of |terms|) or None on overflow."""
    terms = [1.0]
    term = 1.0
    size = 1.0
    for s in range(_MAX_TERMS):
        term *= (p + s) * z / ((c + s) * (s + 1))
        if not math.isfinite(term):
            return None
        if term == 0.0:
            break
        terms.append(term)
        size += abs(term)
        # past the peak once s > |z|; stop below double resolution
        if s > abs(z) and abs(term) < 1e-17 * size:
            break
    else:
        return None
    total = math.fsum(terms)
    return total, math.fsum(abs(t) for t in terms)


def _series_mp(p: float, c: float, z: float, dps: int):
    """Same series as _series_float, looped in mpmath at ``dps`` digits."""
    with mpmath.workdps(dps):
        p_, c_, z_ = mpmath.mpf(p), mpmath.mpf(c), mpmath.mpf(z)
        term = mpmath.mpf(1)
        total = mpmath.mpf(1)
        total_abs = mpmath.mpf(1)
        eps = mpmath.mpf(10) ** (-dps - 5)
        for s in range(_MAX_TERMS):
            term = term * (p_ + s) * z_ / ((c_ + s) * (s + 1))
            if term == 0:
                break
            total += term
            total_abs += abs(term)
            if s > abs(z) and abs(term) < eps * total_abs:
                break
        return total, total_abs


def _log_series(p: float, c: float, z: float, notes: list[str]):
    """ln|M(p, c, z)| and its sign, switching to high precision under cancellation."""
    degraded = False
    res = _series_float(p, c, z)
    if res is not None:
        total, total_abs = res
        amp = total_abs / abs(total) if total != 0 else math.inf
        if amp <= AMPLIFICATION_LIMIT:
            return SignedLogValue.from_float(total), degraded
        notes.append(f"float series amplification {amp:.3g} at p={p!r} z={z!r}")
    else:
        notes.append(f"float series overflow at p={p!r} z={z!r}")
    degraded = True
    dps = 30
    while True:
        total, total_abs = _series_mp(p, c, z, dps)
        if total == 0:
            # an exact zero survives a second, much finer pass
            if dps >= 100:
                break
            dps = 100
            continue
        lost = float(mpmath.log10(total_abs / abs(total)))
        # need at least 20 clean digits after the cancellation
        if dps - lost >= 20 or dps > 20000:
            break
        dps = int(lost) + 40
    notes.append(f"elevated precision {dps} digits")
    if total == 0:
        return SignedLogValue.zero(), degraded
    return SignedLogValue(1 if total > 0 else -1, float(mpmath.log(abs(total)))), degraded


def kummer_reg_asymptotic(alpha: float, c: float, z: float, tol: float = 1e-13):
    """Large negative z expansion of M(alpha, c, z)/Gamma(c).

    M(alpha, c, z)/Gamma(c) ~ (-z)^(-alpha)/Gamma(c-alpha) * sum_k (alpha)_k (alpha-c+1)_k / k! (-z)^(-k).
    The exponentially small companion term is of relative size
    e^z |z|^(2 alpha - c); the result is returned only when both that term and
    the smallest series term fall below ``tol``. Returns None outside that
    window.
    """
    if z >= 0:
        return None
    y = -z
    rg = sp.rgamma(c - alpha)
    if rg == 0:
        return None
    companion = z + (2 * alpha - c) * math.log(y) + math.lgamma(c - alpha) - math.lgamma(alpha)
    if companion > math.log(tol):
        return None
    total, term = 1.0, 1.0
    for k in range(200):
        nxt = term * (alpha + k) * (alpha - c + 1 + k) / ((k + 1) * y)
        if abs(nxt) > abs(term):
            return None
        term = nxt
        total += term
        if abs(term) < tol * abs(total):
            break
    else:
        return None
    val = SignedLogValue.from_float(total * math.copysign(1.0, rg))
    return SignedLogValue.from_parts(val.sign, val.log_abs - alpha * math.log(y) + math.log(abs(rg)))


def _kummer_one(p: float, c: float, z: float, notes: list[str]):
    """Regularized M(p, c, z)/Gamma(c) with c in {1, 2}; returns (value, degraded, method)."""
    if z == 0:
        return SignedLogValue(1, -math.lgamma(c)), False, "series"
    is_int = float(p).is_integer()
    if z < -ASYMPTOTIC_SWITCH and not is_int:
        asym = kummer_reg_asymptotic(p, c, z)
        if asym is not None:
            return asym, False, "asymptotic"
    if z < 0:
        # M(p, c, z) = e^z M(c-p, c, -z); for integer p >= c the series terminates
        val, degraded = _log_series(c - p, c, -z, notes)
        return SignedLogValue.from_parts(val.sign, val.log_abs + z - math.lgamma(c)), degraded, "kummer-transform"
    val, degraded = _log_series(p, c, z, notes)
    return SignedLogValue.from_parts(val.sign, val.log_abs - math.lgamma(c)), degraded, "series"


def kummer_reg(alpha: float, z: float) -> KummerPair:
    """Regularized Kummer value M(alpha,1,z) and derivative alpha*M(alpha+1,2,z)/Gamma(2)."""
    alpha, z = float(alpha), float(z)
    if not (math.isfinite(alpha) and math.isfinite(z)):
        raise DomainError("kummer_reg needs finite arguments")
    notes: list[str] = []
    m_val, deg1, meth1 = _kummer_one(alpha, 1.0, z, notes)
    if alpha == 0:
        m_prime, deg2, meth2 = SignedLogValue.zero(), False, meth1
    else:
        inner, deg2, meth2 = _kummer_one(alpha + 1, 2.0, z, notes)
        m_prime = inner.scale(alpha)
    method = meth1 if meth1 == meth2 else f"{meth1}/{meth2}"
    return KummerPair(m_val, m_prime, deg1 or deg2, method, tuple(notes))
