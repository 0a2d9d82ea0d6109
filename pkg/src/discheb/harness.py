"""Error measurement against the exact oracle, sweeps and convergence slopes."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, TextIO

import numpy as np

from .asymptotic_eval import approximate
from .exact_eval import PolyTriple, eval_exact_series, to_signed_log
from .regime import Regime, Thresholds, classify
from .values import DiscChebError, InfeasibleSizeError, SignedLogValue

# O(n) big-rational steps on O(N log N)-bit numbers; past this the oracle is too slow
MAX_EXACT_DEGREE = 50_000
# jitter points below this fraction of the largest |exact| sit near a zero
RETAIN_FRACTION = 1e-3

CSV_FIELDS = ("n", "x", "capN", "regime", "exact_sign", "exact_log", "approx_sign", "approx_log", "rel_err", "sign_match")


@dataclass(frozen=True)
class ErrorRecord:
    n: int
    x: int
    capN: int
    regime: Regime
    exact: SignedLogValue
    approx: SignedLogValue
    rel_err: float
    sign_match: bool
    constants: object = field(default=None, compare=False)
    error: str | None = field(default=None, compare=False)


def relative_error(exact: SignedLogValue, approx: SignedLogValue) -> tuple[float, bool]:
    """|approx/exact - 1| from log magnitudes; a sign mismatch reports exp(d) + 1 >= 1."""
    if exact.sign == 0 or approx.sign == 0:
        same = exact.sign == approx.sign
        return (0.0 if same else math.inf), same
    d = approx.log_abs - exact.log_abs
    if exact.sign == approx.sign:
        return abs(math.expm1(d)), True
    return math.exp(d) + 1.0, False


def compare(p: PolyTriple, regime_override: Regime | None = None, thresholds: Thresholds | None = None,
            terms: int | None = None) -> ErrorRecord:
    """Approximate p (classifying it unless overridden) and measure it against the exact value.

    ``terms`` defaults to the full sum in the series regime, which is then exact.
    """
    if p.n > MAX_EXACT_DEGREE:
        raise InfeasibleSizeError(f"n={p.n} exceeds the exact-oracle guard {MAX_EXACT_DEGREE}")
    r = regime_override or classify(p, thresholds)
    res = approximate(p, thresholds, regime=r, terms=terms if terms is not None else p.n + 1)
    exact = to_signed_log(eval_exact_series(p))
    rel, match = relative_error(exact, res.value)
    return ErrorRecord(p.n, _int_x(p), p.capN, r, exact, res.value, rel, match, res.constants)


def _int_x(p: PolyTriple):
    return int(p.x) if p.x_is_integer else p.x


@dataclass(frozen=True)
class SweepSpec:
    """A limit path: for each N the rule gives (n, x centre); x is jittered around the centre."""

    name: str
    regime: Regime
    N_list: tuple[int, ...]
    rule: Callable[[int], tuple[int, int]]
    x_jitter: int = 5
    thresholds: Thresholds = field(default_factory=Thresholds)

    def __post_init__(self):
        if list(self.N_list) != sorted(set(self.N_list)):
            raise ValueError("N_list must be strictly increasing")
        if self.x_jitter < 1:
            raise ValueError("x_jitter must be >= 1")

    def points(self) -> list[PolyTriple]:
        pts = []
        half = self.x_jitter // 2
        for N in self.N_list:
            n, xc = self.rule(N)
            for x in range(xc - half, xc - half + self.x_jitter):
                pts.append(PolyTriple(n, x, N))
        return pts


def _bessel_rule(N):
    return int(N**0.4), N // 4


def _kummer_rule(N):
    return int(N**0.7), 5


def _airy_rule(N):
    x = math.ceil(N**0.2)
    return round(math.sqrt(x * N)), x


def _gamma_neg_rule(N):
    return int(N**0.6), -3


def _fixed_b_rule(N):
    return N // 2, N // 8


# Default thresholds put the Kummer path (rho up to ~0.4, b = 0.126 at N = 1000)
# in the Airy or fixed-b band and the Airy path (x <= 10) below x_hi, so those
# two paths carry their own cutoffs.
PATHS: dict[str, SweepSpec] = {
    "bessel": SweepSpec("bessel", Regime.BesselSmallB, (500, 2000, 8000), _bessel_rule),
    "kummer": SweepSpec("kummer", Regime.KummerSmallB, (1000, 4000, 16000), _kummer_rule,
                        thresholds=Thresholds(rho_lo=0.5, b_hi=0.15)),
    "airy": SweepSpec("airy", Regime.AirySmallB, (2000, 8000, 32000), _airy_rule,
                      thresholds=Thresholds(x_hi=3.0)),
    "gamma-neg": SweepSpec("gamma-neg", Regime.GammaNegSmallB, (1000, 4000, 16000), _gamma_neg_rule),
    "fixed-b": SweepSpec("fixed-b", Regime.KummerFixedB, (200, 800, 3200), _fixed_b_rule),
}


def path_spec(name: str, N_list: Iterable[int] | None = None) -> SweepSpec:
    spec = PATHS[name]
    return replace(spec, N_list=tuple(N_list)) if N_list is not None else spec


def _sweep_point(args) -> ErrorRecord:
    p, spec = args
    r = classify(p, spec.thresholds)
    try:
        if r is not spec.regime:
            raise DiscChebError(f"point classified as {r}, path expects {spec.regime}")
        return compare(p, thresholds=spec.thresholds)
    except DiscChebError as exc:
        exact = to_signed_log(eval_exact_series(p)) if p.n <= MAX_EXACT_DEGREE else SignedLogValue.zero()
        return ErrorRecord(p.n, _int_x(p), p.capN, r, exact, SignedLogValue.zero(), math.inf, False,
                           error=f"{type(exc).__name__}: {exc}")


def sweep(spec: SweepSpec, workers: int = 1) -> list[ErrorRecord]:
    """One record per (N, jittered x) in deterministic order; failures become inf-error records."""
    jobs = [(p, spec) for p in spec.points()]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_sweep_point, jobs))
    return [_sweep_point(j) for j in jobs]


def retained(records: list[ErrorRecord]) -> list[ErrorRecord]:
    """Drop points whose |exact| is below 1e-3 of the largest at the same (n, capN)."""
    out = []
    for group in _groups(records).values():
        top = max(r.exact.log_abs for r in group)
        cut = top + math.log(RETAIN_FRACTION)
        out.extend(r for r in group if r.exact.sign != 0 and r.exact.log_abs >= cut)
    return out


def _groups(records: list[ErrorRecord]) -> dict[tuple[int, int], list[ErrorRecord]]:
    groups: dict[tuple[int, int], list[ErrorRecord]] = {}
    for r in records:
        groups.setdefault((r.capN, r.n), []).append(r)
    return groups


def median_errors(records: list[ErrorRecord]) -> dict[int, float]:
    """Median rel_err of the retained jitter points, keyed by capN."""
    by_n: dict[int, list[float]] = {}
    for r in retained(records):
        by_n.setdefault(r.capN, []).append(r.rel_err)
    return {N: statistics.median(v) for N, v in sorted(by_n.items())}


def convergence_order(records: list[ErrorRecord]) -> float:
    """Least-squares slope of ln(median rel_err) against ln N."""
    med = median_errors(records)
    if len(med) < 3:
        raise ValueError(f"need at least 3 distinct N, got {len(med)}")
    Ns = np.array(list(med), dtype=float)
    errs = np.array(list(med.values()), dtype=float)
    if not np.all(np.isfinite(errs) & (errs > 0)):
        raise ValueError("median errors must be finite and positive for a log-log fit")
    slope, _ = np.polyfit(np.log(Ns), np.log(errs), 1)
    return float(slope)


# ---------------------------------------------------------------- serialisation


def _fmt(v: float) -> str:
    return repr(float(v))


def _row(r: ErrorRecord) -> dict[str, str]:
    return {
        "n": str(r.n),
        "x": str(r.x),
        "capN": str(r.capN),
        "regime": r.regime.value,
        "exact_sign": str(r.exact.sign),
        "exact_log": _fmt(r.exact.log_abs),
        "approx_sign": str(r.approx.sign),
        "approx_log": _fmt(r.approx.log_abs),
        "rel_err": _fmt(r.rel_err),
        "sign_match": "true" if r.sign_match else "false",
    }


def _json_obj(r: ErrorRecord) -> dict:
    def num(v):
        # JSON has no inf; keep the repr text so the round trip stays lossless
        return v if math.isfinite(v) else repr(v)

    return {
        "n": r.n,
        "x": r.x if isinstance(r.x, int) else str(r.x),
        "capN": r.capN,
        "regime": r.regime.value,
        "exact_sign": r.exact.sign,
        "exact_log": num(r.exact.log_abs),
        "approx_sign": r.approx.sign,
        "approx_log": num(r.approx.log_abs),
        "rel_err": num(r.rel_err),
        "sign_match": r.sign_match,
    }


def dumps(records: list[ErrorRecord], fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
        w.writeheader()
        for r in records:
            w.writerow(_row(r))
        return buf.getvalue()
    if fmt == "json":
        return json.dumps([_json_obj(r) for r in records], indent=1) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def emit(records: list[ErrorRecord], fmt: str, destination: str | os.PathLike | TextIO) -> None:
    """Write records as CSV or JSON to a path or an open text stream."""
    text = dumps(records, fmt)
    if hasattr(destination, "write"):
        destination.write(text)
        return
    with open(destination, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _parse_x(s):
    from fractions import Fraction

    v = Fraction(str(s))
    return int(v) if v.denominator == 1 else v


def _record(d: dict) -> ErrorRecord:
    def f(v):
        return float(v)

    exact = SignedLogValue.from_parts(int(d["exact_sign"]), f(d["exact_log"]))
    approx = SignedLogValue.from_parts(int(d["approx_sign"]), f(d["approx_log"]))
    match = d["sign_match"]
    if isinstance(match, str):
        match = {"true": True, "false": False}[match]
    return ErrorRecord(int(d["n"]), _parse_x(d["x"]), int(d["capN"]), Regime(d["regime"]),
                       exact, approx, f(d["rel_err"]), bool(match))


def parse(text: str, fmt: str) -> list[ErrorRecord]:
    """Inverse of dumps."""
    if fmt == "csv":
        reader = csv.DictReader(io.StringIO(text))
        if reader.fieldnames is not None and tuple(reader.fieldnames) != CSV_FIELDS:
            raise ValueError(f"unexpected CSV header {reader.fieldnames}")
        return [_record(row) for row in reader]
    if fmt == "json":
        return [_record(obj) for obj in json.loads(text)]
    raise ValueError(f"unknown format {fmt!r}")
