import io
import math
import random
from fractions import Fraction

import pytest

from discheb import harness
from discheb.exact_eval import PolyTriple
from discheb.harness import (
    CSV_FIELDS,
    ErrorRecord,
    SweepSpec,
    compare,
    convergence_order,
    dumps,
    emit,
    median_errors,
    parse,
    path_spec,
    relative_error,
    retained,
    sweep,
)
from discheb.regime import Regime
from discheb.values import DomainError, InfeasibleSizeError, SignedLogValue


def slog(sign, log):
    return SignedLogValue.from_parts(sign, log)


def test_relative_error_conventions():
    assert relative_error(slog(1, 2.0), slog(1, 2.0)) == (0.0, True)
    rel, ok = relative_error(slog(-1, 10.0), slog(-1, 10.0 + math.log(1.01)))
    assert ok and rel == pytest.approx(0.01, rel=1e-12)
    rel, ok = relative_error(slog(1, 0.0), slog(-1, math.log(0.5)))
    assert not ok and rel == pytest.approx(1.5) and rel >= 1
    # magnitudes far beyond float range stay finite in log space
    rel, ok = relative_error(slog(1, 5000.0), slog(1, 5000.0 + 1e-9))
    assert ok and rel == pytest.approx(1e-9, rel=1e-6)
    assert relative_error(SignedLogValue.zero(), slog(1, 0.0)) == (math.inf, False)


def test_compare_full_series_is_exact():
    rec = compare(PolyTriple(1, 3, 10), Regime.SeriesAsymptotic)
    assert rec.rel_err == 0 and rec.sign_match
    assert rec.exact == slog(-1, math.log(4))


def test_compare_bessel_example():
    rec = compare(PolyTriple(10, 2500, 10000))
    assert rec.regime is Regime.BesselSmallB
    assert math.isfinite(rec.rel_err) and rec.sign_match


def test_compare_override_errors_surface():
    with pytest.raises(DomainError):
        compare(PolyTriple(10, 2500, 10000), Regime.GammaNegSmallB)


def test_compare_size_guard():
    with pytest.raises(InfeasibleSizeError):
        compare(PolyTriple(50_001, 3, 10**6))


def test_sweep_cardinality_and_tags():
    recs = sweep(path_spec("bessel"))
    assert len(recs) == 15
    assert all(r.regime is Regime.BesselSmallB and r.error is None for r in recs)
    assert [(r.capN, r.x) for r in recs] == [(N, N // 4 + d) for N in (500, 2000, 8000) for d in range(-2, 3)]


def test_sweep_parallel_matches_serial():
    spec = path_spec("fixed-b", [200, 400])
    assert sweep(spec, workers=2) == sweep(spec)


def test_sweep_records_failures_without_aborting():
    spec = SweepSpec("odd", Regime.AirySmallB, (500,), lambda N: (8, N // 4))
    recs = sweep(spec)
    assert len(recs) == 5
    assert all(r.rel_err == math.inf and "BesselSmallB" in r.error for r in recs)


def test_path_points_classify_into_intended_regime():
    from discheb.regime import classify

    for name, spec in harness.PATHS.items():
        for p in spec.points():
            assert classify(p, spec.thresholds) is spec.regime, (name, p)


def test_sweep_spec_validation():
    with pytest.raises(ValueError):
        SweepSpec("bad", Regime.BesselSmallB, (2000, 500), lambda N: (1, 1))
    with pytest.raises(ValueError):
        SweepSpec("bad", Regime.BesselSmallB, (500,), lambda N: (1, 1), x_jitter=0)


def _synthetic(power, c=3.0):
    recs = []
    for N in (100, 1000, 10000, 100000):
        err = c / N**power
        for j in range(5):
            recs.append(ErrorRecord(10, j, N, Regime.KummerSmallB, slog(1, 0.0), slog(1, math.log1p(err)), err, True))
    return recs


@pytest.mark.parametrize("power", [1.0, 1 / 3])
def test_convergence_order_synthetic(power):
    assert convergence_order(_synthetic(power)) == pytest.approx(-power, abs=0.01)


def test_convergence_order_needs_three_sizes():
    with pytest.raises(ValueError):
        convergence_order(_synthetic(1.0)[:10])


def test_median_stable_under_permutation():
    recs = sweep(path_spec("fixed-b", [200, 400]))
    shuffled = recs[:]
    random.Random(7).shuffle(shuffled)
    assert median_errors(shuffled) == median_errors(recs)


def test_retained_drops_near_zero_points():
    big = ErrorRecord(5, 0, 100, Regime.KummerSmallB, slog(1, 10.0), slog(1, 10.0), 0.0, True)
    small = ErrorRecord(5, 1, 100, Regime.KummerSmallB, slog(1, 10.0 + math.log(1e-4)), slog(1, 0.0), 0.9, True)
    assert retained([big, small]) == [big]


def _records():
    return [
        ErrorRecord(10, 2500, 10000, Regime.BesselSmallB, slog(-1, 123.456789012345678), slog(-1, 123.4567), 1.0000000000000002e-5, True),
        ErrorRecord(3, -2, 7, Regime.GammaNegSmallB, slog(1, 0.1), slog(-1, 0.3), 2.2214027581601699, False),
        ErrorRecord(4, Fraction(1, 2), 9, Regime.SeriesAsymptotic, slog(1, -1e-300), SignedLogValue.zero(), math.inf, False),
    ]


@pytest.mark.parametrize("fmt", ["csv", "json"])
def test_round_trip(fmt):
    recs = _records()
    assert parse(dumps(recs, fmt), fmt) == recs


def test_csv_header_and_empty():
    assert dumps([], "csv") == ",".join(CSV_FIELDS) + "\n"
    assert parse(dumps([], "csv"), "csv") == []
    one = dumps(_records()[:1], "csv")
    assert len(one.splitlines()) == 2


def test_json_length_for_sweep():
    import json

    recs = sweep(path_spec("bessel"))
    assert len(json.loads(dumps(recs, "json"))) == 15


def test_emit_to_path_and_stream(tmp_path):
    recs = _records()
    target = tmp_path / "r.csv"
    emit(recs, "csv", target)
    buf = io.StringIO()
    emit(recs, "csv", buf)
    assert target.read_text() == buf.getvalue()
    with pytest.raises(OSError):
        emit(recs, "csv", tmp_path / "missing" / "r.csv")


def test_csv_is_deterministic():
    spec = path_spec("fixed-b", [200, 400])
    assert dumps(sweep(spec), "csv") == dumps(sweep(spec), "csv")
