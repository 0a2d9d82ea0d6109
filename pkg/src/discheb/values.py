"""Signed-log number representation and the package's error hierarchy.

A SignedLogValue stores a real number as a sign in {-1, 0, +1} together with
the natural log of its magnitude, so gamma-ratio prefactors of size e^(1e5)
can be carried and multiplied without overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable


class DiscChebError(Exception):
    """Base class for all errors raised by this package."""


class DegenerateInputError(DiscChebError, ValueError):
    """Input violates a structural precondition (e.g. n > capN)."""


class DomainError(DiscChebError, ValueError):
    """Parameters lie outside the domain of a formula or regime."""


class NoConvergenceError(DiscChebError, ArithmeticError):
    """A root solve failed to bracket or converge."""


class BranchError(DiscChebError, ArithmeticError):
    """A quantity expected to be real came out with a sizeable imaginary part."""


class InfeasibleSizeError(DiscChebError, ValueError):
    """The exact oracle would be too expensive for the requested size."""


@dataclass(frozen=True)
class SignedLogValue:
    sign: int
    log_abs: float

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or 1, got {self.sign!r}")
        if (self.sign == 0) != (self.log_abs == -math.inf):
            raise ValueError("sign == 0 must coincide with log_abs == -inf")

    @classmethod
    def zero(cls) -> "SignedLogValue":
        return cls(0, -math.inf)

    @classmethod
    def from_float(cls, v: float) -> "SignedLogValue":
        if math.isnan(v):
            raise ValueError("cannot represent NaN")
        if v == 0:
            return cls.zero()
        return cls(1 if v > 0 else -1, math.log(abs(v)))

    @classmethod
    def from_parts(cls, sign: int, log_abs: float) -> "SignedLogValue":
        """Build from a sign and log, normalising zero consistently."""
        if sign == 0 or log_abs == -math.inf:
            return cls.zero()
        return cls(1 if sign > 0 else -1, float(log_abs))

    def to_float(self) -> float:
        """Convert to float; overflows to +-inf and underflows to 0."""
        if self.sign == 0:
            return 0.0
        if self.log_abs > 709.78:
            return self.sign * math.inf
        return self.sign * math.exp(self.log_abs)

    def __neg__(self) -> "SignedLogValue":
        return SignedLogValue(-self.sign, self.log_abs)

    def __mul__(self, other: "SignedLogValue") -> "SignedLogValue":
        if not isinstance(other, SignedLogValue):
            return NotImplemented
        if self.sign == 0 or other.sign == 0:
            return SignedLogValue.zero()
        return SignedLogValue(self.sign * other.sign, self.log_abs + other.log_abs)

    def scale(self, factor: float) -> "SignedLogValue":
        """Multiply by an ordinary float factor."""
        return self * SignedLogValue.from_float(factor)


def signed_log_sum(terms: Iterable[SignedLogValue]) -> SignedLogValue:
    """Sum signed-log values by shifting to the largest magnitude first."""
    terms = [t for t in terms if t.sign != 0]
    if not terms:
        return SignedLogValue.zero()
    top = max(t.log_abs for t in terms)
    if math.isinf(top):
        raise OverflowError("infinite term in signed-log sum")
    total = math.fsum(t.sign * math.exp(t.log_abs - top) for t in terms)
    if total == 0:
        return SignedLogValue.zero()
    return SignedLogValue(1 if total > 0 else -1, top + math.log(abs(total)))
