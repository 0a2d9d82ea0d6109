"""Exact and asymptotic evaluation of discrete Chebyshev polynomials t_n(x, N+1)."""

from .values import (
    BranchError,
    DegenerateInputError,
    DiscChebError,
    DomainError,
    InfeasibleSizeError,
    NoConvergenceError,
    SignedLogValue,
)
from .exact_eval import PolyTriple, eval_exact_recurrence, eval_exact_series, to_signed_log

__all__ = [
    "BranchError",
    "DegenerateInputError",
    "DiscChebError",
    "DomainError",
    "InfeasibleSizeError",
    "NoConvergenceError",
    "PolyTriple",
    "SignedLogValue",
    "eval_exact_recurrence",
    "eval_exact_series",
    "to_signed_log",
]
