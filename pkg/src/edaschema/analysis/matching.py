"""Pair entities of a baseline stage with the same entities at a later stage.

Paths match on (startpoint, endpoint, check type), arcs on (path key, driver
pin, sink pin), nets on name. Entities seen at only one stage, or lacking the
compared attribute at either stage, are dropped and counted.
"""

from __future__ import annotations

from dataclasses import fields

from ..errors import AvailabilityError
from ..schema import AreaMetrics, CellMetrics, NetlistSummary, PowerMetrics, TimingMetrics
from ..stages import at_or_after, require_available, stage_index
from .metrics import MatchedSeries, Pair

DEFAULT_ATTR = {"path": "slack", "cell_arc": "delay", "net_arc": "delay", "net": "length"}
_PATH_ATTRS = {"slack": "slack", "arrival_time": "arrival_time", "required_time": "required_time"}
_ARC_ATTRS = {"delay": "delay", "slew": "slew", "arrival_time": "arrival", "capacitance": "capacitance"}
_BUNDLES = {"summary": NetlistSummary, "cell_metrics": CellMetrics, "area_metrics": AreaMetrics,
            "power_metrics": PowerMetrics, "timing_metrics": TimingMetrics}


def worst_paths(s) -> dict:
    """One path per key; duplicates keep the smallest slack."""
    out = {}
    for p in s.timing_paths:
        cur = out.get(p.key)
        if cur is None or p.slack < cur.slack:
            out[p.key] = p
    return out


def _arcs(s, kind: str, attr: str) -> dict:
    node_attr = _ARC_ATTRS[attr]
    out = {}
    for key, p in worst_paths(s).items():
        for driver, sink, node in p.arcs:
            if node.kind == kind:
                out[(*key, driver, sink)] = getattr(node, node_attr)
    return out


def design_value(s, attr: str):
    """A design-level metric of snapshot ``s``; ``None`` when not present.

    ``estimated_wirelength`` is the routed total from detailed route on and the
    HPWL total before that (absent until cells are placed).
    """
    if attr == "estimated_wirelength":
        if s.summary.total_wirelength is not None:
            return s.summary.total_wirelength
        return s.summary.total_hpwl
    for name, cls in _BUNDLES.items():
        if any(f.name == attr for f in fields(cls)):
            bundle = getattr(s, name)
            return None if bundle is None else getattr(bundle, attr)
    if s.clock is not None and hasattr(s.clock, attr):
        return getattr(s.clock, attr)
    raise KeyError(f"unknown design metric {attr!r}")


def net_estimate(s, name: str):
    """Routed length from detailed route on, HPWL before."""
    net = s.netlist.nets.get(name)
    if net is None:
        return None
    return net.length if at_or_after(s.stage, "detailed_route") else net.hpwl


def _values(s, kind: str, attr: str) -> dict:
    if kind == "path":
        a = _PATH_ATTRS[attr]
        return {k: getattr(p, a) for k, p in worst_paths(s).items()}
    if kind in ("cell_arc", "net_arc"):
        return _arcs(s, kind, attr)
    if kind == "net":
        if attr == "estimate":
            return {n.name: net_estimate(s, n.name) for n in s.netlist.nets.values() if not n.is_special_net}
        require_available("net", attr, s.stage)
        return {n.name: getattr(n, attr) for n in s.netlist.nets.values() if not n.is_special_net}
    if kind == "design":
        return {(s.design,): design_value(s, attr)}
    raise ValueError(f"unknown series kind {kind!r}")


def _pair_up(kind: str, base: dict, final: dict) -> MatchedSeries:
    pairs = []
    excluded = len(set(base) ^ set(final))
    for key in sorted(set(base) & set(final), key=repr):
        b, f = base[key], final[key]
        if b is None or f is None:
            excluded += 1
            continue
        pairs.append(Pair(key if isinstance(key, tuple) else (key,), float(b), float(f)))
    return MatchedSeries(kind, pairs, excluded)


def match_series(stage_a, stage_b, kind: str, attr: str | None = None) -> MatchedSeries:
    """Baseline values from ``stage_a``, final values from ``stage_b``."""
    if stage_a.design != stage_b.design:
        raise ValueError(f"snapshots belong to different designs: {stage_a.design} vs {stage_b.design}")
    attr = attr or DEFAULT_ATTR.get(kind)
    if attr is None:
        raise ValueError(f"kind {kind!r} needs an explicit attribute")
    return _pair_up(kind, _values(stage_a, kind, attr), _values(stage_b, kind, attr))


def hpwl_baseline(stage_a, stage_b) -> MatchedSeries:
    """Per-net HPWL at a pre-route stage against routed length at ``stage_b``."""
    if stage_index(stage_a.stage) >= stage_index("detailed_route"):
        raise ValueError(f"HPWL baseline needs a stage before detailed_route, got {stage_a.stage}")
    require_available("net", "length", stage_b.stage)
    base = {n.name: n.hpwl for n in stage_a.netlist.nets.values() if not n.is_special_net}
    final = {n.name: n.length for n in stage_b.netlist.nets.values() if not n.is_special_net}
    return _pair_up("net", base, final)


__all__ = ["AvailabilityError", "design_value", "hpwl_baseline", "match_series", "net_estimate",
           "worst_paths"]
