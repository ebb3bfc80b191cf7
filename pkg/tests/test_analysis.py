import copy
import json
import math
import random
from fractions import Fraction
from types import SimpleNamespace

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from edaschema.analysis import (Instance, MatchedSeries, OperatingClass, Pair, baseline_report,
                                classification_metrics, classify_operating_point, classify_scpr, clock_periods,
                                compute_statistics, directional_metrics, hpwl_baseline, mae_decomposition,
                                match_series, nearest_rank, parameter_correlation, pearson, scpr,
                                sweep_manifest, tail_metrics)
from edaschema.analysis.correlation import CONSTANT
from edaschema.analysis.metrics import (FLAT, INSUFFICIENT, MAPE_OVER, NO_NEGATIVE, NO_POSITIVE, R2_UNDER,
                                        UNDEFINED, mae, mape, r_squared)
from edaschema.analysis.report import format_value
from edaschema.analysis.sweep import UNCERTAINTY_CAP_TABLE, normalize_pdk
from edaschema.errors import ValidationError
from edaschema.schema import AreaMetrics
from oracles import ref_pearson


# --- operating points ----------------------------------------------------

@pytest.mark.parametrize("ws,tcp,text", [
    (0.0078, 0.6, "BarelyPass 1.30%"), (-0.0425, 0.5, "BarelyFail -8.50%"),
    (0.1158, 1.5, "BarelyPass 7.72%"), (0.0006, 2.5, "BarelyPass 0.02%"),
    (1.0, 1.0, "Pass 100.00%"), (-0.2, 1.0, "Fail -20.00%"),
])
def test_operating_points(ws, tcp, text):
    assert classify_operating_point(ws, tcp).render() == text


def test_class_boundaries():
    assert classify_scpr(0.0) is OperatingClass.PASS
    assert classify_scpr(10.0) is OperatingClass.PASS
    assert classify_scpr(-10.0) is OperatingClass.FAIL
    assert classify_scpr(-9.999) is OperatingClass.BARELY_FAIL
    with pytest.raises(ValueError):
        scpr(0.1, 0.0)


# --- sweep ---------------------------------------------------------------

def test_clock_periods_rounded_and_ordered():
    assert clock_periods(0.6, 0.5) == [0.4, 0.5, 0.6, 0.72]
    assert clock_periods(1.0, 1.0) == [0.8, 1.0, 1.2]
    with pytest.raises(ValidationError):
        clock_periods(0.4, 0.5)


def test_sweep_ng45_size_and_values():
    sets = sweep_manifest(0.6, 0.5, "NG45")
    assert len(sets) == 108
    assert {c.clock_period for c in sets} == {0.4, 0.5, 0.6, 0.72}
    assert {c.aspect_ratio for c in sets} == {0.5, 1.0, 1.5}
    assert {c.utilization for c in sets} == {0.3, 0.4, 0.5}
    assert {c.placement_density for c in sets} == {1.0, 1.25, 1.5}
    assert len({c.constraint_hash() for c in sets}) == 108
    c = next(c for c in sets if c.clock_period == 0.6)
    assert c.input_delay == pytest.approx(0.12) and c.output_delay == pytest.approx(0.12)
    assert c.clock_latency == pytest.approx(0.006)
    assert c.clock_uncertainty == pytest.approx(0.03)
    assert c.clock_transition == 0.05 and c.core_margin == 5.72


def test_sweep_caps():
    big = sweep_manifest(8.25, 8.0, "SKY130")
    c = max(big, key=lambda c: c.clock_period)
    assert c.clock_latency == 0.05
    assert c.clock_uncertainty == pytest.approx(0.25)
    tab = sweep_manifest(8.25, 8.0, "SKY130", uncertainty_cap=UNCERTAINTY_CAP_TABLE)
    assert max(c.clock_uncertainty for c in tab) == 0.05


@pytest.mark.parametrize("pdk,utils", [("SKY130", {0.2, 0.3, 0.4}), ("IHP130", {0.2, 0.3, 0.4}),
                                       ("ASAP7", {0.3, 0.4, 0.5}), ("ng45", {0.3, 0.4, 0.5})])
def test_sweep_utilization_per_pdk(pdk, utils):
    assert {c.utilization for c in sweep_manifest(1.0, 0.9, pdk)} == utils


def test_unknown_pdk():
    with pytest.raises(ValueError):
        normalize_pdk("gf12")
    assert normalize_pdk("sky130hd") == "SKY130"


# --- metrics -------------------------------------------------------------

def test_metric_worked_example():
    s = MatchedSeries.from_values([1.0, 2.0, 4.0], [2.0, 2.0, 2.0])
    assert mae(s) == pytest.approx(1.0)
    assert mape(s) == pytest.approx(50.0)
    assert r_squared(s) is FLAT
    d = directional_metrics(s)
    assert (d.mpe, d.mne, d.n_p, d.n_n) == (2.0, 1.0, 1, 1)


def test_mape_skips_zero_finals_and_thresholds():
    s = MatchedSeries.from_values([1.0, 5.0], [0.0, 4.0])
    assert mape(s) == pytest.approx(25.0)
    assert mape(MatchedSeries.from_values([1.0], [0.0])) is UNDEFINED
    assert mape(MatchedSeries.from_values([101.0], [1.0])) == pytest.approx(10000.0)
    assert mape(MatchedSeries.from_values([101.0001], [1.0])) is MAPE_OVER


def test_r2_threshold():
    f = [0.0, 1.0, 2.0]
    # ss_tot = 2; ss_res = 4 gives r2 = -1 exactly (kept); slightly more gives the sentinel
    assert r_squared(MatchedSeries.from_values([0.0, 1.0, 4.0], f)) == -1.0
    assert r_squared(MatchedSeries.from_values([0.0, 1.0, 4.01], f)) is R2_UNDER


def test_directional_sentinels():
    d = directional_metrics(MatchedSeries.from_values([1.0, 2.0], [1.0, 3.0]))
    assert d.mpe is NO_POSITIVE and d.mne == 1.0
    d = directional_metrics(MatchedSeries.from_values([3.0], [1.0]))
    assert d.mne is NO_NEGATIVE


def test_classification_rates():
    s = MatchedSeries.from_values([-1, -1, 1, 1, -1], [-1, 1, 1, -2, 3])
    c = classification_metrics(s)
    assert (c.tp, c.fn, c.tn, c.fp) == (1, 1, 1, 2)
    assert c.tpr == 0.5 and c.tnr == pytest.approx(1 / 3)
    assert classification_metrics(MatchedSeries.from_values([1], [1])).tpr.code == "UNDEFINED"


def test_nearest_rank():
    assert nearest_rank(list(range(1, 21)), 95) == 19
    assert nearest_rank(list(range(1, 101)), 95) == 95
    assert nearest_rank([5.0], 95) == 5.0
    with pytest.raises(ValueError):
        nearest_rank([], 50)


def test_tail_metrics_small_and_top():
    small = tail_metrics(MatchedSeries.from_values([1.0] * 5, [2.0] * 5))
    assert small.mae_top5 is INSUFFICIENT and small.mae_p95 == 1.0
    f = [float(i) for i in range(1, 41)]
    b = [x + (10 if x > 38 else 1) for x in f]
    t = tail_metrics(MatchedSeries.from_values(b, f))
    assert t.top_size == 2  # cut = 38, finals 39 and 40 above it
    assert t.mae_top5 == 10.0


def test_empty_series_is_undefined():
    out = compute_statistics(MatchedSeries("design"), ("mae", "mape", "n_p"))
    assert out == {"mae": UNDEFINED, "mape": UNDEFINED, "n_p": 0}


def test_duplicate_keys_rejected():
    with pytest.raises(ValueError):
        MatchedSeries("net", [Pair(("a",), 1, 1), Pair(("a",), 2, 2)])


_vals = st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=1, max_size=60)


@settings(max_examples=150, deadline=None)
@given(st.data())
def test_mae_decomposition_exact(data):
    f = data.draw(_vals)
    b = data.draw(st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=len(f), max_size=len(f)))
    s = MatchedSeries.from_values(b, f)
    total, pos, neg = mae_decomposition(s)
    assert total == pos + neg
    d = directional_metrics(s)
    assert d.n_p + d.n_n == sum(1 for x, y in zip(b, f) if x != y)
    expect = sum((abs(Fraction(x) - Fraction(y)) for x, y in zip(b, f)), Fraction(0))
    assert total == expect


@settings(max_examples=100, deadline=None)
@given(_vals)
def test_self_series_zero_error(v):
    s = MatchedSeries.from_values(v, v)
    assert mae(s) == 0.0
    m = mape(s)
    assert m == 0.0 or m is UNDEFINED
    r = r_squared(s)
    assert r == 1.0 or r.code == "UNDEFINED"


# --- correlation ---------------------------------------------------------

def test_pearson_basics():
    x = [1.0, 2.0, 3.0, 4.0]
    assert pearson(x, x) == 1.0
    assert pearson(x, [-v for v in x]) == -1.0
    assert pearson(x, [5.0] * 4) is CONSTANT
    with pytest.raises(ValueError):
        pearson([1.0], [1.0])


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-100, 100, allow_nan=False), min_size=3, max_size=30), st.floats(0.1, 10),
       st.floats(-50, 50), st.randoms())
def test_pearson_properties(x, a, c, rnd):
    assume(max(x) - min(x) > 1e-3)
    y = [rnd.uniform(-5, 5) + v for v in x]
    assume(max(y) - min(y) > 1e-3)
    r = pearson(x, y)
    assert -1.0 <= r <= 1.0
    assert math.isclose(pearson([a * v + c for v in x], y), r, rel_tol=1e-9, abs_tol=1e-9)
    assert math.isclose(r, max(-1.0, min(1.0, ref_pearson(x, y))), rel_tol=1e-9, abs_tol=1e-12)


def test_parameter_correlation_groups():
    rows = parameter_correlation([
        {"design": "a", "constraints": {"clock_period": 1.0}, "metrics": {"area": 10.0}},
        {"design": "a", "constraints": {"clock_period": 2.0}, "metrics": {"area": 20.0}},
        {"design": "a", "constraints": {"clock_period": 3.0}, "metrics": {"area": 30.0}},
        {"design": "b", "constraints": {"clock_period": 1.0}, "metrics": {"area": 5.0}},
        {"design": "b", "constraints": {"clock_period": 2.0}, "metrics": {"area": 5.0}},
    ], parameters=["clock_period"])
    assert [(r.design, r.n) for r in rows] == [("a", 3), ("b", 2)]
    assert rows[0].r == pytest.approx(1.0)
    assert rows[1].r is CONSTANT


# --- matching and report -------------------------------------------------

def test_match_series_paths(four_gate):
    # all eight records run in1 -> out1; the worst per (start, end, check) survives
    s = match_series(four_gate["cts"], four_gate["final"], "path")
    assert [p.key for p in s.pairs] == [("in1", "out1", "hold"), ("in1", "out1", "setup")]
    assert s.excluded_count == 0 and s.final[1] == pytest.approx(0.0078)
    assert mae(s) == 0.0


def test_hpwl_baseline(four_gate):
    s = hpwl_baseline(four_gate["global_place"], four_gate["detailed_route"])
    assert len(s) == 5
    assert math.fsum(s.baseline) == pytest.approx(13.48)
    assert math.fsum(s.final) == pytest.approx(14.7925)
    with pytest.raises(ValueError):
        hpwl_baseline(four_gate["detailed_route"], four_gate["final"])


def test_match_excludes_unmatched(four_gate):
    b = copy.deepcopy(four_gate["cts"])
    b.timing_paths = [p for p in b.timing_paths if p.key[2] == "setup"]
    s = match_series(b, four_gate["final"], "path")
    assert len(s) == 1 and s.excluded_count == 1


def test_self_report_is_zero(four_gate):
    inst = Instance("four_gate", "NG45", dict(four_gate), "i0")
    rep = baseline_report([inst], [("global_route", "global_route")],
                          ["total_area", "total_power", "worst_slack", "path_slack", "path_arrival_time"])
    area = rep.row("total_area", "global_route", "global_route")
    assert area.values["mae"] == 0.0 and area.values["mape"] == 0.0
    ws = rep.row("path_slack", "global_route", "global_route").values
    assert ws["mae"] == 0.0 and ws["tnr"] == 1.0 and ws["n_p"] == 0
    assert rep.row("total_power", "global_route", "global_route").n == 0


def test_report_unavailable_and_formatting(four_gate):
    inst = Instance("four_gate", "NG45", dict(four_gate), "i0")
    rep = baseline_report([inst], [("floorplan", "detailed_route")], ["total_wirelength"])
    row = rep.rows[0]
    assert not row.available and row.values["mae"].code == "UNAVAILABLE"
    text = rep.to_csv()
    assert text.startswith("# averaging=pooled")
    assert "UNAVAILABLE" in text
    doc = json.loads(rep.to_json())
    assert doc["rows"][0]["values"]["mae"]["sentinel"] == "UNAVAILABLE"


def test_format_value():
    assert format_value("mape", MAPE_OVER) == ">10000%"
    assert format_value("mape", 12.345) == "12.35%"
    assert format_value("tpr", 0.5) == "50.00%"
    assert format_value("mae", 0.123456) == "0.1235"
    assert format_value("n_p", 3) == "3"


def _area_instance(design, iid, base, final):
    def snap(stage, v):
        return SimpleNamespace(design=design, stage=stage, summary=None, cell_metrics=None,
                               area_metrics=AreaMetrics(total_area=v), power_metrics=None,
                               timing_metrics=None, clock=None)
    return Instance(design, "NG45", {"cts": snap("cts", base), "detailed_route": snap("detailed_route", final)},
                    iid)


def test_pooled_vs_macro():
    data = [("a", 10.0, 11.0), ("a", 10.0, 12.0), ("a", 10.0, 13.0), ("b", 1.0, 5.0)]
    insts = [_area_instance(d, f"i{i}", b, f) for i, (d, b, f) in enumerate(data)]
    random.Random(3).shuffle(insts)
    pooled = baseline_report(insts, [("cts", "detailed_route")], ["total_area"]).rows[0].values
    macro = baseline_report(insts, [("cts", "detailed_route")], ["total_area"], "macro").rows[0].values
    assert pooled["mae"] == pytest.approx((1 + 2 + 3 + 4) / 4)
    assert macro["mae"] == pytest.approx((2 + 4) / 2)
