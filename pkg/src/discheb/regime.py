"""Regime classification and the constants of each canonical transformation.

The scaled variables are a = x/capN and b = n/capN. After the inner saddle
point t0(w) in t has been eliminated, every regime works with the reduced
phase

    F(w) = b ln(1-t0) + (1-b) ln t0 + a ln w - a ln(1-w) + b ln(1-(1-t0) w)

on the plane cut along (-inf, 0] and [1, inf); its saddles are
w+- = (b +- sqrt(b^2 - 4a + 4a^2)) / (2b). Each regime maps F onto a model
phase (logarithmic-linear, cubic, u - 1/u, or a ln(-u) - u) and the constants
of that map are solved for here.
"""

from __future__ import annotations

import cmath
import enum
import math
import os
from dataclasses import asdict, dataclass, fields
from fractions import Fraction
from typing import Union

from scipy.optimize import brentq

from .exact_eval import PolyTriple
from .values import BranchError, DegenerateInputError, DiscChebError, DomainError, NoConvergenceError

# imaginary parts below this are rounding noise on quantities known to be real
IMAG_TOL = 1e-10


class ConfigError(DiscChebError, ValueError):
    """Malformed thresholds configuration."""


class Regime(str, enum.Enum):
    SeriesAsymptotic = "SeriesAsymptotic"
    KummerSmallB = "KummerSmallB"
    AirySmallB = "AirySmallB"
    BesselSmallB = "BesselSmallB"
    GammaNegSmallB = "GammaNegSmallB"
    KummerFixedB = "KummerFixedB"
    ExactFallback = "ExactFallback"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class ScaledParams:
    a: float
    b: float
    rho: float


@dataclass(frozen=True)
class Thresholds:
    rho_lo: float = 0.05
    rho_hi: float = 20.0
    x_lo: float = 1.0
    x_hi: float = 30.0
    b_hi: float = 0.1
    eta_n_min: float = 10.0

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ConfigError(f"threshold {f.name} must be a positive number, got {v!r}")
        if not self.rho_lo < self.rho_hi:
            raise ConfigError("rho_lo must be below rho_hi")
        if not self.x_lo < self.x_hi:
            raise ConfigError("x_lo must be below x_hi")

    @classmethod
    def from_file(cls, path: str | os.PathLike) -> "Thresholds":
        """Read key=value lines; blank lines and # comments are skipped."""
        with open(path, encoding="utf-8") as fh:
            return cls.from_text(fh.read())

    @classmethod
    def from_text(cls, text: str) -> "Thresholds":
        known = {f.name for f in fields(cls)}
        values: dict[str, float] = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, val = line.partition("=")
            key, val = key.strip(), val.strip()
            if not sep or key not in known:
                raise ConfigError(f"line {lineno}: expected one of {sorted(known)} as key=value, got {raw!r}")
            try:
                values[key] = float(val)
            except ValueError:
                raise ConfigError(f"line {lineno}: {key} needs a number, got {val!r}") from None
        return cls(**values)

    def to_text(self) -> str:
        return "".join(f"{k}={v!r}\n" for k, v in asdict(self).items())


@dataclass(frozen=True)
class KummerConstants:
    eta: float
    gamma: float
    complex_saddles: bool = False


@dataclass(frozen=True)
class AiryConstants:
    zeta: float
    A: float


@dataclass(frozen=True)
class BesselConstants:
    m: float
    gamma: float


@dataclass(frozen=True)
class GammaNegConstants:
    gamma: float


RegimeConstants = Union[KummerConstants, AiryConstants, BesselConstants, GammaNegConstants]


# ---------------------------------------------------------------- classification


def fold(p: PolyTriple) -> tuple[PolyTriple, int]:
    """Reflect x > capN/2 to capN - x; returns the folded triple and the sign (-1)^n it costs."""
    if 2 * p.x > p.capN:
        return PolyTriple(p.n, p.capN - p.x, p.capN), (-1) ** p.n
    return p, 1


def scaled_params(p: PolyTriple) -> ScaledParams:
    """a = x/capN, b = n/capN and rho = a/b^2 = x capN / n^2."""
    if p.n == 0:
        raise DegenerateInputError("scaled parameters need n >= 1")
    x = Fraction(p.x)
    return ScaledParams(float(x / p.capN), p.n / p.capN, float(x * p.capN / p.n**2))


def classify(p: PolyTriple, t: Thresholds | None = None) -> Regime:
    """Pick the approximant family for p; x beyond capN/2 is folded first.

    Degree 0, degree 1 and x = 0 never reach an expansion: the first has no
    scaled parameters and the other two make the series exact in at most two
    terms.
    """
    t = t or Thresholds()
    p, _ = fold(p)
    if p.n == 0:
        return Regime.ExactFallback
    if p.n == 1 or p.x == 0:
        return Regime.SeriesAsymptotic
    s = scaled_params(p)
    x = float(p.x)
    if x < 0:
        return Regime.GammaNegSmallB if s.b <= t.b_hi else Regime.ExactFallback
    if s.b > t.b_hi:
        return Regime.KummerFixedB
    if s.rho > t.rho_hi:
        return Regime.BesselSmallB if x >= t.x_hi else Regime.SeriesAsymptotic
    if s.rho >= t.rho_lo:
        return Regime.AirySmallB if x >= t.x_hi else Regime.ExactFallback
    if p.n**2 / p.capN >= t.eta_n_min:
        return Regime.KummerSmallB
    return Regime.SeriesAsymptotic


# ---------------------------------------------------------------- phase functions


def _sqrt_d(w: complex, b: float) -> complex:
    return cmath.sqrt(1 + 4 * b * b * (w - 1) * w)


def saddle_t0(w: complex, b: float) -> complex:
    """Saddle t0(w) of f(., w), written without the cancellation at w -> 0."""
    return (1 + 2 * b * b * (w - 1) / (1 + _sqrt_d(w, b))) / (1 + b)


def one_minus_t0(w: complex, b: float) -> complex:
    """1 - t0(w), accurate when t0 is close to 1."""
    return b * (1 - 2 * b * (w - 1) / (1 + _sqrt_d(w, b))) / (1 + b)


def phase_t(t: complex, w: complex, a: float, b: float) -> complex:
    """f(t, w) with principal logarithms and the -a ln(1-w) edge convention."""
    return (
        b * cmath.log(1 - t)
        + (1 - b) * cmath.log(t)
        + _a_log(a, w)
        - _a_log(a, 1 - w)
        + b * cmath.log(1 - (1 - t) * w)
    )


def dphase_dt(t: complex, w: complex, b: float) -> complex:
    return -b / (1 - t) + (1 - b) / t + b * w / (1 - (1 - t) * w)


def _a_log(a: float, z: complex) -> complex:
    return 0j if a == 0 else a * cmath.log(z)


def reduced_phase(w: complex, a: float, b: float) -> complex:
    """F(w) = f(t0(w), w) for a >= 0."""
    t, omt = saddle_t0(w, b), one_minus_t0(w, b)
    return (
        b * cmath.log(omt)
        + (1 - b) * cmath.log(t)
        + _a_log(a, w)
        - _a_log(a, 1 - w)
        + b * cmath.log(1 - omt * w)
    )


def reduced_phase_neg(w: complex, a: float, b: float) -> complex:
    """The a < 0 variant, with a ln(-w) so that the negative saddle is on the principal branch."""
    t, omt = saddle_t0(w, b), one_minus_t0(w, b)
    return (
        b * cmath.log(omt)
        + (1 - b) * cmath.log(t)
        + a * cmath.log(-w)
        - a * cmath.log(1 - w)
        + b * cmath.log(1 - omt * w)
    )


def reduced_phase_dd(w: complex, a: float, b: float) -> complex:
    """F''(w) at a saddle w+-, where it reduces to b^2 (2w-1) / (w (1-w) (1-2a))."""
    return b * b * (2 * w - 1) / (w * (1 - w) * (1 - 2 * a))


def saddles_w(a: float, b: float) -> tuple[complex, complex]:
    """w+- = (b +- sqrt(b^2 - 4a + 4a^2)) / (2b)."""
    if not 0 < b < 1:
        raise DomainError(f"need 0 < b < 1, got b={b}")
    disc = cmath.sqrt(b * b - 4 * a + 4 * a * a)
    return (b + disc) / (2 * b), (b - disc) / (2 * b)


def saddles_u(eta: float, a: float) -> tuple[complex, complex]:
    """Saddles of psi(u) = a ln u - a ln(1-u) + eta u."""
    r = cmath.sqrt(eta * eta + 4 * a * eta)
    return (eta + r) / (2 * eta), (eta - r) / (2 * eta)


def psi(u: complex, a: float, eta: float) -> complex:
    return _a_log(a, u) - _a_log(a, 1 - u) + eta * u


def saddles_v(a: float, b: float) -> tuple[complex, complex]:
    """Saddles in v = 1/w: v+- = (b^2 -+ i b sqrt(4a - 4a^2 - b^2)) / (2a(1-a))."""
    s2 = 4 * a - 4 * a * a - b * b
    if not s2 > 0:
        raise DomainError(f"complex v saddles need 4a(1-a) > b^2, got a={a}, b={b}")
    s = math.sqrt(s2)
    den = 2 * a * (1 - a)
    return complex(b * b, -b * s) / den, complex(b * b, b * s) / den


def _real(z: complex, what: str, scale: float = 1.0) -> float:
    if abs(z.imag) > IMAG_TOL * max(1.0, scale):
        raise BranchError(f"{what} has imaginary part {z.imag:.3e}")
    return z.real


# ---------------------------------------------------------------- Kummer


def kummer_residual(eta: float, a: float, b: float, complex_saddles: bool) -> float:
    """[psi(u-) - psi(u+)] - [F(w+) - F(w-)], real or imaginary part by case."""
    up, um = saddles_u(eta, a)
    wp, wm = saddles_w(a, b)
    d = (psi(um, a, eta) - psi(up, a, eta)) - (reduced_phase(wp, a, b) - reduced_phase(wm, a, b))
    return d.imag if complex_saddles else d.real


def solve_kummer_constants(a: float, b: float) -> KummerConstants:
    """Solve F(t0(w), w) = psi(u) + gamma with w+ <-> u- and w- <-> u+.

    For real w-saddles eta lies on (-inf, -4a]; past the coalescence curve
    b^2 = 4a(1-a) the saddles are complex and eta lies on (-4a, 0), where the
    imaginary parts of the difference relation are matched instead.
    """
    if not 0 < b < 1:
        raise DomainError(f"need 0 < b < 1, got b={b}")
    if a < 0:
        raise DomainError(f"Kummer constants need a >= 0, got a={a}")
    wp, wm = saddles_w(a, b)
    if a == 0:
        eta = _real(reduced_phase(wp, 0.0, b) - reduced_phase(wm, 0.0, b), "eta")
        gamma = _real(reduced_phase(wm, 0.0, b), "gamma")
        return KummerConstants(eta, gamma, False)
    complex_saddles = b * b < 4 * a * (1 - a)

    def g(e):
        return kummer_residual(e, a, b, complex_saddles)

    if complex_saddles:
        lo, hi = -4 * a, -4 * a * 1e-14
        glo, ghi = g(lo), g(hi)
        if glo * ghi > 0:
            raise NoConvergenceError(f"eta not bracketed on [{lo}, {hi}]: g={glo:.3e}, {ghi:.3e}")
    else:
        hi = -4 * a
        ghi = g(hi)
        step = max(b * b, 4 * a)
        lo = hi - step
        for _ in range(200):
            glo = g(lo)
            if glo * ghi <= 0:
                break
            step *= 2
            lo = hi - step
        else:
            raise NoConvergenceError(f"eta not bracketed below {hi}: g(hi)={ghi:.3e}, last lo={lo:.3e}")
    if ghi == 0:
        eta = hi
    else:
        try:
            eta = brentq(g, lo, hi, xtol=1e-300, rtol=1e-15, maxiter=500)
        except (RuntimeError, ValueError) as exc:
            raise NoConvergenceError(f"eta solve on [{lo}, {hi}] failed: {exc}") from exc
    up, _ = saddles_u(eta, a)
    gamma_c = reduced_phase(wm, a, b) - psi(up, a, eta)
    gamma = _real(gamma_c, "Kummer gamma")
    return KummerConstants(float(eta), gamma, complex_saddles)


# ---------------------------------------------------------------- Airy


def airy_residuals(c: AiryConstants, a: float, b: float) -> tuple[float, float]:
    """|F(w+) - (A - 2/3 zeta^1.5)| and |F(w-) - (A + 2/3 zeta^1.5)|."""
    wp, wm = saddles_w(a, b)
    z32 = c.zeta * cmath.sqrt(c.zeta)
    return (
        abs(reduced_phase(wp, a, b) - (c.A - 2 / 3 * z32)),
        abs(reduced_phase(wm, a, b) - (c.A + 2 / 3 * z32)),
    )


def solve_airy_constants(a: float, b: float) -> AiryConstants:
    """Match F(t0(w), w) = u^3/3 - zeta u + A with w+ <-> sqrt(zeta), w- <-> -sqrt(zeta)."""
    if not 0 < b < 1:
        raise DomainError(f"need 0 < b < 1, got b={b}")
    if not a > 0:
        raise DomainError(f"Airy constants need a > 0, got a={a}")
    wp, wm = saddles_w(a, b)
    fp, fm = reduced_phase(wp, a, b), reduced_phase(wm, a, b)
    if wp.imag == 0:
        d = _real(fm - fp, "Airy saddle difference")
        zeta = math.copysign((0.75 * abs(d)) ** (2 / 3), d)
        A = _real(0.5 * (fp + fm), "Airy A")
    else:
        if abs(fp.real - fm.real) > IMAG_TOL or abs(fp.imag + fm.imag) > IMAG_TOL:
            raise BranchError("saddle values of F are not complex conjugates")
        if fp.imag < -IMAG_TOL:
            raise BranchError(f"Im F(w+) = {fp.imag:.3e} has the wrong sign for the cubic map")
        # rounding can leave Im F(w+) a hair below zero right on the coalescence curve
        zeta = -((1.5 * max(fp.imag, 0.0)) ** (2 / 3))
        A = fp.real
    return AiryConstants(zeta, A)


# ---------------------------------------------------------------- Bessel


def bessel_constants(a: float, b: float) -> BesselConstants:
    """Closed forms for m and gamma of the map onto m(u - 1/u) + gamma."""
    if not 0 < b < 1:
        raise DomainError(f"need 0 < b < 1, got b={b}")
    s2 = 4 * a - 4 * a * a - b * b
    if not (a > 0 and s2 > 0):
        raise DomainError(f"Bessel constants need 4a(1-a) > b^2, got a={a}, b={b}")
    s = math.sqrt(s2)
    gamma = 0.5 * (math.log1p(-b) - math.log1p(b)) + 0.5 * b * (2 * math.log(b) - math.log1p(-b * b))
    # arctan(p/q) with q possibly negative is the angle atan2(p, q) in (0, pi)
    m = -0.5 * (
        (1 - b) * math.atan2(b * s, 2 - 2 * a - b * b)
        - a * math.atan2(b * s, 2 * a - 2 * a * a - b * b)
        - 2 * b * math.atan2(s, 2 + b - 2 * a)
    )
    if not m > 0:
        raise BranchError(f"Bessel m = {m} is not positive")
    return BesselConstants(m, gamma)


# ---------------------------------------------------------------- a < 0


def gamma_neg_constant(a: float, b: float) -> GammaNegConstants:
    """gamma in F~(t0(w), w) = a ln(-u) - u + gamma with u(w-) = a."""
    if not 0 < b < 1:
        raise DomainError(f"need 0 < b < 1, got b={b}")
    if not a < 0:
        raise DomainError(f"the a < 0 map needs a < 0, got a={a}")
    _, wm = saddles_w(a, b)
    w = wm.real
    if not w < 0:
        raise BranchError(f"negative saddle expected, got w- = {w}")
    val = reduced_phase_neg(w, a, b) - (a * math.log(-a) - a)
    return GammaNegConstants(_real(val, "gamma for a < 0"))


def solve_constants(regime: Regime, a: float, b: float) -> RegimeConstants:
    """Dispatch to the solver matching a regime tag."""
    if regime in (Regime.KummerSmallB, Regime.KummerFixedB):
        return solve_kummer_constants(a, b)
    if regime is Regime.AirySmallB:
        return solve_airy_constants(a, b)
    if regime is Regime.BesselSmallB:
        return bessel_constants(a, b)
    if regime is Regime.GammaNegSmallB:
        return gamma_neg_constant(a, b)
    raise DomainError(f"regime {regime} has no mapping constants")
