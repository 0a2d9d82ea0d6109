"""Command-line front end.

Exit codes: 0 success, 2 bad arguments or configuration, 3 domain or regime
errors, 4 I/O errors. Data goes to stdout (or --out); diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from . import harness
from .asymptotic_eval import approximate
from .exact_eval import PolyTriple, eval_exact_series, to_signed_log
from .regime import ConfigError, Regime, Thresholds, classify, fold, scaled_params
from .values import DiscChebError, SignedLogValue

EXIT_ARGS, EXIT_DOMAIN, EXIT_IO = 2, 3, 4

REGIME_NAMES = {
    "auto": None,
    "kummer": Regime.KummerSmallB,
    "airy": Regime.AirySmallB,
    "bessel": Regime.BesselSmallB,
    "gamma-neg": Regime.GammaNegSmallB,
    "fixed-b": Regime.KummerFixedB,
    "series": Regime.SeriesAsymptotic,
}

CAPN_HELP = "support parameter: the N in t_n(x, N+1), so the support is x = 0..N"


def _rational(s: str) -> Fraction:
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {s!r}") from None


def _n_list(s: str) -> list[int]:
    try:
        vals = [int(v) for v in s.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {s!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty N list")
    return vals


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="discheb",
        description="Exact and asymptotic evaluation of discrete Chebyshev polynomials t_n(x, N+1).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def point(p, with_io=False):
        p.add_argument("--n", type=int, required=True, help="degree n >= 0")
        p.add_argument("--x", type=_rational, required=True, help="argument x (integer or p/q)")
        p.add_argument("--capN", type=int, required=True, help=CAPN_HELP)
        p.add_argument("--thresholds", help="key=value file overriding regime cutoffs")
        if with_io:
            p.add_argument("--out", help="output file (default stdout)")
            p.add_argument("--format", choices=("csv", "json"), default="csv")

    point(sub.add_parser("eval", help="exact value"))
    ap = sub.add_parser("approx", help="leading-order asymptotic value")
    point(ap)
    ap.add_argument("--regime", choices=tuple(REGIME_NAMES), default="auto")
    ap.add_argument("--terms", type=int, default=2, help="K for the series regime (default 2)")
    point(sub.add_parser("classify", help="regime tag and scaled parameters"))
    cp = sub.add_parser("compare", help="approximation error against the exact value")
    point(cp, with_io=True)
    cp.add_argument("--regime", choices=tuple(REGIME_NAMES), default="auto")
    cp.add_argument("--terms", type=int, help="K for the series regime (default: full sum)")

    sp = sub.add_parser("sweep", help="error records along a canonical limit path")
    sp.add_argument("--path", choices=tuple(harness.PATHS), required=True)
    sp.add_argument("--N-list", dest="n_list", type=_n_list, help="comma-separated N values")
    sp.add_argument("--thresholds", help="key=value file overriding the path's cutoffs")
    sp.add_argument("--out", help="output file (default stdout)")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--workers", type=int, default=1)
    return parser


def _fmt_slog(v: SignedLogValue) -> str:
    return f"sign={v.sign} log_abs={v.log_abs!r}"


def _thresholds(args) -> Thresholds | None:
    return Thresholds.from_file(args.thresholds) if args.thresholds else None


def _constants_text(c) -> str:
    if c is None:
        return "none"
    items = " ".join(f"{k}={v!r}" for k, v in vars(c).items())
    return f"{type(c).__name__} {items}"


def _write(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _run(args) -> int:
    if args.command == "sweep":
        spec = harness.path_spec(args.path, args.n_list)
        if args.thresholds:
            from dataclasses import replace

            spec = replace(spec, thresholds=Thresholds.from_file(args.thresholds))
        records = harness.sweep(spec, workers=args.workers)
        for r in records:
            if r.error:
                print(f"n={r.n} x={r.x} capN={r.capN}: {r.error}", file=sys.stderr)
        _write(harness.dumps(records, args.format), args.out)
        return 0

    p = PolyTriple(args.n, args.x, args.capN)
    t = _thresholds(args)
    if args.command == "eval":
        v = eval_exact_series(p)
        text = str(v)
        print(text if len(text) <= 80 else _fmt_slog(to_signed_log(v)))
    elif args.command == "classify":
        r = classify(p, t)
        s = scaled_params(fold(p)[0]) if p.n > 0 else None
        if s is None:
            print(f"{r.value}")
        else:
            print(f"{r.value} rho={s.rho!r} a={s.a!r} b={s.b!r}")
    elif args.command == "approx":
        if args.terms < 1:
            raise argparse.ArgumentTypeError("--terms must be >= 1")
        res = approximate(p, t, regime=REGIME_NAMES[args.regime], terms=args.terms)
        print(_fmt_slog(res.value))
        print(f"regime {res.regime.value}")
        print(f"constants {_constants_text(res.constants)}")
        if res.coeffs is not None:
            print(f"coeffs c0={res.coeffs.c0!r} d0={res.coeffs.d0!r}")
        for note in res.diagnostics:
            print(note, file=sys.stderr)
    elif args.command == "compare":
        rec = harness.compare(p, REGIME_NAMES[args.regime], t, terms=args.terms)
        _write(harness.dumps([rec], args.format), args.out)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with 2 on bad arguments
    try:
        return _run(args)
    except (ConfigError, argparse.ArgumentTypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ARGS
    except DiscChebError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
