"""Cross-stage baseline report: one row per metric, stage pair and PDK.

Each earlier stage's value is treated as a prediction of the later stage's
value. Rows are averaged either by pooling every matched pair across
instances (default) or by macro-averaging per-circuit results.
"""

from __future__ import annotations

import csv
import io
import json
import math
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from ..stages import at_or_after, stage_index
from .matching import match_series
from .metrics import STATISTICS, UNDEFINED, MatchedSeries, Pair, Sentinel, compute_statistics

UNAVAILABLE = Sentinel("UNAVAILABLE", "not available at the baseline stage")
PERCENT_STATS = ("mape", "mape_p95", "mape_top5", "tpr", "tnr")
COUNT_STATS = ("n_p", "n_n")


@dataclass(frozen=True)
class MetricSpec:
    name: str
    kind: str  # design | net | path | cell_arc | net_arc
    attr: str
    statistics: tuple[str, ...]
    first_stage: str = "floorplan"  # earliest stage with a meaningful baseline


_REG = ("mae", "mape", "r2")
_TAIL = ("mae_p95", "mape_p95", "mae_top5", "mape_top5")
_DIR = ("mae", "mpe", "mne", "n_p", "n_n")

METRICS: dict[str, MetricSpec] = {m.name: m for m in (
    MetricSpec("total_area", "design", "total_area", _REG),
    MetricSpec("total_power", "design", "total_power", _REG),
    MetricSpec("total_wirelength", "design", "estimated_wirelength", _REG, "global_place"),
    MetricSpec("interconnect_length", "net", "estimate", _REG + _TAIL, "global_place"),
    MetricSpec("worst_arrival_time", "design", "worst_arrival_time", ("mae", "mape")),
    MetricSpec("worst_slack", "design", "worst_slack", _DIR + ("tpr", "tnr")),
    MetricSpec("total_negative_slack", "design", "total_negative_slack", _DIR),
    MetricSpec("path_arrival_time", "path", "arrival_time", ("mae", "mape") + _TAIL),
    MetricSpec("path_slack", "path", "slack", _DIR + ("tpr", "tnr")),
    MetricSpec("net_arc_delay", "net_arc", "delay", _REG),
    MetricSpec("cell_arc_delay", "cell_arc", "delay", _REG),
    MetricSpec("cell_arc_slew", "cell_arc", "slew", _REG),
)}

DEFAULT_PAIRS = tuple((s, "detailed_route") for s in
                      ("floorplan", "global_place", "detailed_place", "cts", "global_route"))


@dataclass
class Instance:
    """In-memory instance: snapshots keyed by stage name."""

    design: str
    pdk: str
    snapshots: dict
    id: str = ""

    @property
    def stages(self) -> list[str]:
        return sorted(self.snapshots, key=stage_index)

    def snapshot(self, stage: str):
        return self.snapshots.get(stage)


@dataclass
class ReportRow:
    metric: str
    baseline_stage: str
    final_stage: str
    pdk: str
    n: int
    excluded: int
    values: dict[str, object]
    available: bool = True

    @property
    def stage_pair(self) -> str:
        return f"{self.baseline_stage}->{self.final_stage}"


@dataclass
class BaselineReport:
    rows: list[ReportRow] = field(default_factory=list)
    averaging: str = "pooled"

    @property
    def header(self) -> str:
        other = "macro" if self.averaging == "pooled" else "pooled"
        return (f"averaging={self.averaging}; cross-circuit weighting is a reporting choice, "
                f"rerun with averaging={other} to compare")

    def row(self, metric: str, baseline_stage: str, final_stage: str = "detailed_route",
            pdk: str | None = None) -> ReportRow:
        for r in self.rows:
            if (r.metric, r.baseline_stage, r.final_stage) == (metric, baseline_stage, final_stage) \
                    and (pdk is None or r.pdk == pdk):
                return r
        raise KeyError((metric, baseline_stage, final_stage, pdk))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        buf.write(f"# {self.header}\n")
        w.writerow(["metric", "stage_pair", "pdk", "n", "excluded", *STATISTICS])
        for r in self.rows:
            w.writerow([r.metric, r.stage_pair, r.pdk, r.n, r.excluded,
                        *(format_value(k, r.values[k]) if k in r.values else "" for k in STATISTICS)])
        return buf.getvalue()

    def to_json(self) -> str:
        def enc(v):
            if isinstance(v, Sentinel):
                return v.to_json()
            return v
        doc = {"averaging": self.averaging, "note": self.header, "rows": [
            {"metric": r.metric, "baseline_stage": r.baseline_stage, "final_stage": r.final_stage,
             "pdk": r.pdk, "n": r.n, "excluded": r.excluded, "available": r.available,
             "values": {k: enc(v) for k, v in r.values.items()}} for r in self.rows]}
        return json.dumps(doc, indent=2, sort_keys=True)


def format_value(stat: str, v) -> str:
    """Percent-type statistics with 2 decimals, counts as integers, the rest with 4."""
    if isinstance(v, Sentinel):
        return v.code
    if stat in COUNT_STATS:
        return str(int(v))
    if stat in PERCENT_STATS:
        pct = v * 100.0 if stat in ("tpr", "tnr") else v
        return f"{pct:.2f}%"
    return f"{v:.4f}"


def instance_series(inst, spec: MetricSpec, baseline_stage: str, final_stage: str
                    ) -> MatchedSeries | None:
    """Matched pairs of one instance, or ``None`` if either stage is missing."""
    a, b = inst.snapshot(baseline_stage), inst.snapshot(final_stage)
    if a is None or b is None:
        return None
    series = match_series(a, b, spec.kind, spec.attr)
    tag = (getattr(inst, "id", "") or a.design,)
    return MatchedSeries(series.kind, [Pair(tag + p.key, p.baseline, p.final) for p in series.pairs],
                         series.excluded_count)


def _average(results: list[dict], wanted) -> dict:
    out = {}
    for k in wanted:
        vals = [r[k] for r in results if not isinstance(r[k], Sentinel)]
        if k in COUNT_STATS:
            out[k] = sum(vals)
        elif vals:
            out[k] = math.fsum(vals) / len(vals)
        else:
            out[k] = next((r[k] for r in results), UNDEFINED)
    return out


def baseline_report(dataset, stage_pairs=DEFAULT_PAIRS, metrics=None, averaging: str = "pooled",
                    jobs: int = 1) -> BaselineReport:
    """Error statistics of every requested metric over every stage pair, per PDK."""
    names = list(metrics or METRICS)
    unknown = [m for m in names if m not in METRICS]
    if unknown:
        raise ValueError(f"unknown metric(s): {', '.join(unknown)}")
    if averaging not in ("pooled", "macro"):
        raise ValueError(f"averaging must be pooled or macro, not {averaging!r}")
    instances = sorted(dataset, key=lambda i: (i.pdk, i.design, getattr(i, "id", "")))
    pdks = sorted({i.pdk for i in instances})
    report = BaselineReport(averaging=averaging)
    for name in names:
        spec = METRICS[name]
        for base_stage, final_stage in stage_pairs:
            if stage_index(base_stage) > stage_index(final_stage):
                raise ValueError(f"stage pair {base_stage}->{final_stage} runs backwards")
            for pdk in pdks:
                group = [i for i in instances if i.pdk == pdk]
                if not at_or_after(base_stage, spec.first_stage):
                    report.rows.append(ReportRow(name, base_stage, final_stage, pdk, 0, 0,
                                                 {k: UNAVAILABLE for k in spec.statistics}, False))
                    continue
                with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
                    parts = list(pool.map(
                        lambda inst: instance_series(inst, spec, base_stage, final_stage), group))
                report.rows.append(_row(spec, base_stage, final_stage, pdk, group, parts, averaging))
    return report


def _row(spec, base_stage, final_stage, pdk, group, parts, averaging) -> ReportRow:
    present = [(inst, s) for inst, s in zip(group, parts) if s is not None]
    excluded = sum(s.excluded_count for _, s in present)
    if averaging == "pooled":
        pooled = MatchedSeries(spec.kind)
        for _, s in present:
            pooled.pairs.extend(s.pairs)
        values = compute_statistics(pooled, spec.statistics)
        n = len(pooled)
    else:
        per_design = defaultdict(lambda: MatchedSeries(spec.kind))
        for inst, s in present:
            per_design[inst.design].pairs.extend(s.pairs)
        results = [compute_statistics(per_design[d], spec.statistics) for d in sorted(per_design)]
        values = _average(results, spec.statistics) if results else compute_statistics(
            MatchedSeries(spec.kind), spec.statistics)
        n = sum(len(s) for s in per_design.values())
    return ReportRow(spec.name, base_stage, final_stage, pdk, n, excluded, values)
