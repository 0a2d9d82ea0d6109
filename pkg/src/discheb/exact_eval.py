"""Exact evaluation of the discrete Chebyshev polynomial t_n(x, capN+1).

Two independent rational oracles are provided: the terminating hypergeometric
sum and the three-term recurrence in the degree for the Hahn polynomials
Q_n(x; 0, 0, capN). Both use Fraction arithmetic throughout, so results are
exact for any rational x.

The public parameter ``capN`` is the N in t_n(x, N+1); the support is the set
of points x = 0, 1, ..., capN.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

from .values import DegenerateInputError, SignedLogValue

_LN2 = math.log(2.0)
_SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class PolyTriple:
    """Evaluation point: degree n, argument x, support parameter capN."""

    n: int
    x: Fraction
    capN: int

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, int):
            raise DegenerateInputError(f"n must be an integer, got {self.n!r}")
        if isinstance(self.capN, bool) or not isinstance(self.capN, int):
            raise DegenerateInputError(f"capN must be an integer, got {self.capN!r}")
        if not isinstance(self.x, Fraction):
            if isinstance(self.x, (int, Rational)):
                object.__setattr__(self, "x", Fraction(self.x))
            else:
                raise DegenerateInputError(f"x must be rational, got {self.x!r}")
        if self.n < 0:
            raise DegenerateInputError(f"n must be >= 0, got {self.n}")
        if self.capN < 1:
            raise DegenerateInputError(f"capN must be >= 1, got {self.capN}")
        if self.n > self.capN:
            raise DegenerateInputError(f"n={self.n} exceeds capN={self.capN}")

    @property
    def x_is_integer(self) -> bool:
        return self.x.denominator == 1


def _prefactor(n: int, capN: int) -> int:
    """(-1)^n (capN+1-n)_n as an exact integer."""
    return (-1) ** n * math.prod(range(capN + 1 - n, capN + 1))


def _term_ratio(k: int, n: int, x: Fraction, capN: int) -> Fraction:
    # T_{k+1} / T_k for the sum of (-n)_k (-x)_k (n+1)_k / ((-capN)_k k!^2)
    return Fraction((k - n) * (k + n + 1), (k - capN) * (k + 1) ** 2) * (k - x)


def hypergeometric_partial_sum(p: PolyTriple, terms: int) -> tuple[Fraction, Fraction]:
    """Sum the first ``terms`` terms of the series.

    Returns the partial sum and the first omitted term (zero once the series
    has terminated).
    """
    n, x, capN = p.n, p.x, p.capN
    total = Fraction(0)
    term = Fraction(1)
    for k in range(min(terms, n + 1)):
        total += term
        if term == 0:
            break
        term = term * _term_ratio(k, n, x, capN) if k < n else Fraction(0)
    if terms > n:
        term = Fraction(0)
    return total, term


def eval_exact_series(p: PolyTriple) -> Fraction:
    """t_n(x, capN+1) from the terminating hypergeometric sum."""
    total, _ = hypergeometric_partial_sum(p, p.n + 1)
    return _prefactor(p.n, p.capN) * total


def eval_exact_recurrence(p: PolyTriple) -> Fraction:
    """t_n(x, capN+1) from the Hahn three-term recurrence with alpha = beta = 0.

    With A_k = (k+1)(capN-k)/(2(2k+1)) and C_k = k(k+capN+1)/(2(2k+1)),
    -x Q_k = A_k Q_{k+1} - (A_k + C_k) Q_k + C_k Q_{k-1}, and Q_0 = 1.
    """
    n, x, capN = p.n, p.x, p.capN
    q_prev, q = Fraction(0), Fraction(1)
    for k in range(n):
        a_k = Fraction((k + 1) * (capN - k), 2 * (2 * k + 1))
        c_k = Fraction(k * (k + capN + 1), 2 * (2 * k + 1))
        q_prev, q = q, ((a_k + c_k - x) * q - c_k * q_prev) / a_k
    return _prefactor(n, capN) * q


def to_signed_log(v: Fraction | int) -> SignedLogValue:
    """Sign and natural log of |v| for an exact rational of any size.

    The value is split as 2^e * s with s in [1/sqrt2, sqrt2), the shift taken
    from the bit lengths, and ln s is taken through log1p of the exact s - 1.
    """
    v = Fraction(v)
    if v == 0:
        return SignedLogValue.zero()
    sign = 1 if v > 0 else -1
    num, den = abs(v.numerator), v.denominator
    e = num.bit_length() - den.bit_length()
    s = Fraction(num, den << e) if e >= 0 else Fraction(num << -e, den)
    if s >= _SQRT2:
        e += 1
        s /= 2
    elif s < 1 / _SQRT2:
        e -= 1
        s *= 2
    return SignedLogValue(sign, e * _LN2 + math.log1p(float(s - 1)))


def degree_check(n: int, capN: int) -> bool:
    """True iff the (n+1)-th forward difference of x -> t_n(x, capN+1) is zero at 0."""
    if n > capN:
        raise DegenerateInputError(f"n={n} exceeds capN={capN}")
    order = n + 1
    diff = sum(
        (-1) ** (order - j) * math.comb(order, j) * eval_exact_series(PolyTriple(n, Fraction(j), capN))
        for j in range(order + 1)
    )
    return diff == 0
