"""Flow hierarchy, stage snapshots and metric bundles, with stage-window enforcement.

A :class:`StageSnapshot` refuses to hold any attribute outside its availability
window (see :mod:`edaschema.stages`). :func:`assemble_stage` builds one from
parsed artifacts: explicitly supplied out-of-window inputs (SPEF, IR samples,
QoR keys) raise, while geometry that a DEF happens to carry early is dropped.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
from dataclasses import asdict, dataclass, field, fields

from .errors import AvailabilityError, ValidationError
from .geometry import Rect
from .graphs import (ClockNetworkGraph, NetlistGraph, TimingPathGraph, build_netlist_graph,
                     build_timing_path_graphs, extract_clock_network)
from .interchange.def_ import PhysicalNetlist
from .interchange.gridcsv import GridSamples
from .interchange.lef import TechLibrary
from .interchange.liberty import CellCatalog
from .interchange.spef import ParasiticSet
from .interchange.sta import TimingPathRecord
from .raster import (SCALAR_K, ScalarMap, SpatialMap, grid_samples_to_scalar_map, make_grid,
                     map_entity_attr, render_clock_maps, render_netlist_maps, render_pdn_maps)
from .stages import (STAGES, at_or_after, is_available, is_canonical_order, require_available,
                     stage_index, window)

logger = logging.getLogger(__name__)

CATEGORIES = ("combinational", "sequential", "buffer", "inverter", "filler", "tap", "diode", "macro")


@dataclass(frozen=True)
class DesignConstraint:
    clock_period: float
    clock_uncertainty: float = 0.0
    clock_latency: float = 0.0
    clock_transition: float = 0.0
    input_delay: float = 0.0
    output_delay: float = 0.0
    aspect_ratio: float = 1.0
    utilization: float = 0.5
    placement_density: float | None = None  # multiple of the uniform target density
    core_margin: float | None = None  # um
    pdk: str | None = None

    def __post_init__(self):
        problems = []
        if not self.clock_period > 0:
            problems.append("clock_period must be > 0")
        if not 0 < self.utilization < 1:
            problems.append("utilization must lie in (0, 1)")
        if not self.aspect_ratio > 0:
            problems.append("aspect_ratio must be > 0")
        if problems:
            raise ValidationError("; ".join(problems), problems)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "DesignConstraint":
        return cls(**{f.name: d[f.name] for f in fields(cls) if f.name in d})

    def constraint_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


@dataclass
class DesignFlow:
    id: str
    design: str
    toolchain: str = "openroad"
    run_status: str = "completed"
    stages: list[str] = field(default_factory=list)

    def __post_init__(self):
        if not is_canonical_order(self.stages):
            raise ValidationError(f"stages {self.stages} are not in canonical order")


@dataclass
class NetlistSummary:
    width: float | None = None  # die, um
    height: float | None = None
    no_of_inputs: int = 0
    no_of_outputs: int = 0
    no_of_cells: int = 0
    no_of_nets: int = 0
    no_of_pins: int = 0
    utilization: float | None = None  # measured: placed cell area / core area
    total_hpwl: float | None = None  # um
    total_wirelength: float | None = None  # um, DR onward


@dataclass
class ClockTreeSummary:
    clock_source: str | None = None
    no_of_buffers: int | None = None
    no_of_clock_sinks: int | None = None


@dataclass
class PdnModel:
    vdd_nets: list[str] = field(default_factory=list)
    vss_nets: list[str] = field(default_factory=list)
    voltage_sources: list[tuple[float, float]] = field(default_factory=list)  # DBU
    strap_pitch: int | None = None  # DBU


@dataclass
class CellMetrics:
    no_of_combinational_cells: int = 0
    no_of_sequential_cells: int = 0
    no_of_buffers: int = 0
    no_of_inverters: int = 0
    no_of_fillers: int = 0
    no_of_tap_cells: int = 0
    no_of_diodes: int = 0
    no_of_macros: int = 0
    no_of_total_cells: int = 0


@dataclass
class AreaMetrics:
    combinational_cell_area: float = 0.0
    sequential_cell_area: float = 0.0
    buffer_area: float = 0.0
    inverter_area: float = 0.0
    filler_area: float = 0.0
    tap_cell_area: float = 0.0
    diode_area: float = 0.0
    macro_area: float = 0.0
    cell_area: float = 0.0
    total_area: float = 0.0


@dataclass
class PowerMetrics:
    combinational_power: float | None = None
    sequential_power: float | None = None
    macro_power: float | None = None
    internal_power: float | None = None
    switching_power: float | None = None
    leakage_power: float | None = None
    total_power: float | None = None


@dataclass
class TimingMetrics:
    total_negative_slack: float | None = None
    worst_slack: float | None = None
    worst_arrival_time: float | None = None
    worst_required_time: float | None = None
    critical_path_startpoint: str | None = None
    critical_path_endpoint: str | None = None
    no_of_endpoints: int | None = None
    no_of_violating_endpoints: int | None = None


_COUNT_FIELD = {"combinational": "no_of_combinational_cells", "sequential": "no_of_sequential_cells",
                "buffer": "no_of_buffers", "inverter": "no_of_inverters", "filler": "no_of_fillers",
                "tap": "no_of_tap_cells", "diode": "no_of_diodes", "macro": "no_of_macros"}
_AREA_FIELD = {"combinational": "combinational_cell_area", "sequential": "sequential_cell_area",
               "buffer": "buffer_area", "inverter": "inverter_area", "filler": "filler_area",
               "tap": "tap_cell_area", "diode": "diode_area", "macro": "macro_area"}

METRIC_BUNDLES = {"cell_metrics": CellMetrics, "area_metrics": AreaMetrics,
                  "power_metrics": PowerMetrics, "timing_metrics": TimingMetrics}


@dataclass(eq=True)
class StageSnapshot:
    """One stage of one design instance. Treat as read-only once constructed."""

    design: str
    stage: str
    dbu_per_micron: int
    die_box: Rect
    core_box: Rect
    w_m1: int
    routing_layers: tuple[str, ...]
    netlist: NetlistGraph
    summary: NetlistSummary = field(default_factory=NetlistSummary)
    run_status: str = "completed"
    clock: ClockTreeSummary | None = None
    clock_tree: ClockNetworkGraph | None = None
    pdn: PdnModel | None = None
    timing_paths: list[TimingPathGraph] = field(default_factory=list)
    cell_metrics: CellMetrics | None = None
    area_metrics: AreaMetrics | None = None
    power_metrics: PowerMetrics | None = None
    timing_metrics: TimingMetrics | None = None
    maps: dict[str, SpatialMap | ScalarMap] = field(default_factory=dict)
    extras: dict[str, float | str] = field(default_factory=dict)  # QoR keys with no schema home

    def __post_init__(self):
        stage_index(self.stage)
        check_availability(self)

    @property
    def routability(self) -> dict[str, ScalarMap]:
        return {k.split("/", 1)[1]: m for k, m in self.maps.items()
                if k.startswith("routability_metrics/")}


# --- availability --------------------------------------------------------

_GATE_ATTRS = ("x_min", "y_min", "x_max", "y_max", "ir_drop_vdd", "ir_drop_vss",
               "internal_power", "switching_power", "leakage_power", "total_power")
_PIN_ATTRS = ("x_min", "y_min", "x_max", "y_max")
_NET_ATTRS = ("x_min", "y_min", "x_max", "y_max", "hpwl", "length", "resistance", "capacitance",
              "total_coupling_capacitance")
_PORT_ATTRS = ("x", "y")


def _present(obj, entity: str, attrs, stage: str, path: str):
    """Yield (path, message) for every non-None attribute outside its window."""
    for a in attrs:
        if getattr(obj, a) is not None and not is_available(entity, a, stage):
            first, last = window(entity, a)
            yield f"{path}.{a}", f"{entity}.{a} is available only {first}..{last}, not at {stage}"


def availability_breaches(s: StageSnapshot) -> list[tuple[str, str]]:
    out: list[tuple[str, str]] = []
    st = s.stage
    g = s.netlist
    for name, x in g.gates.items():
        out.extend(_present(x, "gate", _GATE_ATTRS, st, f"gates[{name}]"))
    for name, x in g.pins.items():
        out.extend(_present(x, "pin", _PIN_ATTRS, st, f"pins[{name}]"))
    for name, x in g.nets.items():
        out.extend(_present(x, "net", _NET_ATTRS, st, f"nets[{name}]"))
    for name, x in g.ports.items():
        out.extend(_present(x, "port", _PORT_ATTRS, st, f"ports[{name}]"))
    out.extend(_present(s.summary, "netlist", [f.name for f in fields(NetlistSummary)], st, "summary"))
    if s.clock is not None:
        out.extend(_present(s.clock, "clock_tree", [f.name for f in fields(ClockTreeSummary)], st, "clock"))
    if s.clock_tree is not None and not at_or_after(st, "cts"):
        out.append(("clock_tree", f"clock network graph exists only from cts, not at {st}"))
    for attr, cls in METRIC_BUNDLES.items():
        bundle = getattr(s, attr)
        if bundle is not None:
            out.extend(_present(bundle, attr, [f.name for f in fields(cls)], st, attr))
    for key in s.maps:
        try:
            entity, attr = map_entity_attr(key)
            require_available(entity, attr, st)
        except (AvailabilityError, ValueError) as e:
            out.append((f"maps[{key}]", str(e)))
    return out


def check_availability(s: StageSnapshot) -> None:
    breaches = availability_breaches(s)
    if breaches:
        raise AvailabilityError("; ".join(m for _, m in breaches[:5])
                                + (f" (+{len(breaches) - 5} more)" if len(breaches) > 5 else ""))


def _drop_early_geometry(g: NetlistGraph, stage: str) -> None:
    """Clear geometry the DEF carries before its window opens (e.g. fixed cells at floorplan)."""
    dropped = 0
    for table, entity, attrs in ((g.gates, "gate", _GATE_ATTRS), (g.pins, "pin", _PIN_ATTRS),
                                 (g.nets, "net", ("x_min", "y_min", "x_max", "y_max", "hpwl", "length")),
                                 (g.ports, "port", _PORT_ATTRS)):
        for node in table.values():
            for a in attrs:
                if getattr(node, a) is not None and not is_available(entity, a, stage):
                    setattr(node, a, None)
                    dropped += 1
    if not at_or_after(stage, "detailed_route"):
        before = len(g.wires)
        g.wires = [w for w in g.wires if g.nets[w.net].is_special_net]
        dropped += before - len(g.wires)
    if dropped:
        logger.info("dropped %d geometry attributes not yet available at %s", dropped, stage)


# --- metric computation --------------------------------------------------

def _cell_dims(catalog: CellCatalog, name: str) -> float:
    cell = catalog[name]
    if cell.width is not None and cell.height is not None:
        return cell.width * cell.height
    return cell.area


def compute_cell_metrics(netlist: NetlistGraph, catalog: CellCatalog) -> CellMetrics:
    m = CellMetrics()
    for gate in netlist.gates.values():
        cat = catalog[gate.standard_cell].category
        f = _COUNT_FIELD[cat]
        setattr(m, f, getattr(m, f) + 1)
    m.no_of_total_cells = len(netlist.gates)
    return m


def compute_area_metrics(netlist: NetlistGraph, catalog: CellCatalog, die_box: Rect,
                         dbu_per_micron: int | None = None) -> AreaMetrics:
    """Per-category footprint sums (um^2); ``total_area`` is the die area."""
    d = dbu_per_micron or netlist.dbu_per_micron
    sums: dict[str, list[float]] = {c: [] for c in CATEGORIES}
    for gate in netlist.gates.values():
        sums[catalog[gate.standard_cell].category].append(_cell_dims(catalog, gate.standard_cell))
    m = AreaMetrics()
    for cat, vals in sums.items():
        setattr(m, _AREA_FIELD[cat], math.fsum(vals))
    m.cell_area = math.fsum(getattr(m, _AREA_FIELD[c]) for c in CATEGORIES)
    m.total_area = die_box.area / (d * d)
    return m


def compute_timing_metrics(paths: list[TimingPathGraph]) -> TimingMetrics | None:
    """Setup-path summary: WS, TNS over per-endpoint worst slack, endpoint counts."""
    setup = [p for p in paths if p.path_type == "setup"]
    if not setup:
        return None
    worst = min(setup, key=lambda p: (p.slack, p.startpoint, p.endpoint))
    per_endpoint: dict[str, float] = {}
    for p in setup:
        per_endpoint[p.endpoint] = min(per_endpoint.get(p.endpoint, p.slack), p.slack)
    neg = [v for v in per_endpoint.values() if v < 0]
    return TimingMetrics(
        total_negative_slack=math.fsum(neg) if neg else 0.0,
        worst_slack=worst.slack,
        worst_arrival_time=max(p.arrival_time for p in setup),
        worst_required_time=worst.required_time,
        critical_path_startpoint=worst.startpoint,
        critical_path_endpoint=worst.endpoint,
        no_of_endpoints=len(per_endpoint),
        no_of_violating_endpoints=len(neg),
    )


def compute_summary(g: NetlistGraph, pn: PhysicalNetlist, catalog: CellCatalog, stage: str
                    ) -> NetlistSummary:
    d = pn.dbu_per_micron
    signal = [n for n in g.nets.values() if not n.is_special_net]
    s = NetlistSummary(
        width=pn.die_box.width / d, height=pn.die_box.height / d,
        no_of_inputs=sum(1 for p in g.ports.values() if p.direction == "INPUT"),
        no_of_outputs=sum(1 for p in g.ports.values() if p.direction == "OUTPUT"),
        no_of_cells=len(g.gates), no_of_nets=len(g.nets), no_of_pins=len(g.pins))
    core_um2 = pn.core_box.area / (d * d)
    placed = [_cell_dims(catalog, x.standard_cell) for x in g.gates.values()
              if x.x_min is not None and x.category != "filler"]
    if at_or_after(stage, "global_place") and core_um2 > 0:
        s.utilization = math.fsum(placed) / core_um2
    hp = [n.hpwl for n in signal if n.hpwl is not None]
    if at_or_after(stage, "global_place") and hp:
        s.total_hpwl = math.fsum(hp)
    if at_or_after(stage, "detailed_route"):
        lengths = [n.length for n in signal if n.length is not None]
        if lengths:
            s.total_wirelength = math.fsum(lengths)
    return s


def build_pdn(pn: PhysicalNetlist, strap_pitch: int | None = None) -> PdnModel | None:
    """Power nets by USE (or VDD/VSS naming); sources at the core corner every 2x strap pitch."""
    vdd, vss = [], []
    for net in pn.nets:
        if not net.is_special:
            continue
        use = (net.use or "").upper()
        upper = net.name.upper()
        if use == "POWER" or (not use and upper.startswith("VDD")):
            vdd.append(net.name)
        elif use == "GROUND" or (not use and (upper.startswith("VSS") or upper == "GND")):
            vss.append(net.name)
    if not vdd and not vss:
        return None
    if strap_pitch is None:
        strap_pitch = _strap_pitch(pn, vdd or vss)
    sources: list[tuple[float, float]] = []
    if strap_pitch:
        step = 2 * strap_pitch
        core = pn.core_box
        xs = range(core.x0, core.x1 + 1, step)
        ys = range(core.y0, core.y1 + 1, step)
        sources = [(float(x), float(y)) for y in ys for x in xs]
    return PdnModel(vdd, vss, sources, strap_pitch)


def _strap_pitch(pn: PhysicalNetlist, nets: list[str]) -> int | None:
    """Smallest spacing between distinct vertical straps of one supply net."""
    best = None
    for net in pn.nets:
        if net.name not in nets:
            continue
        xs = sorted({(s.x0 + s.x1) // 2 for s in net.segments if s.x0 == s.x1})
        for a, b in zip(xs, xs[1:]):
            if best is None or b - a < best:
                best = b - a
    return best


# --- QoR routing ---------------------------------------------------------

def _apply_qor(qor: dict, stage: str, bundles: dict, summary: NetlistSummary, extras: dict) -> None:
    for key, value in qor.items():
        target = None
        for entity, obj in bundles.items():
            if any(f.name == key for f in fields(obj)):
                target = (entity, obj)
                break
        if target is None and key in ("total_wirelength", "total_hpwl"):
            target = ("netlist", summary)
        if target is None:
            extras[key] = value
            continue
        entity, obj = target
        require_available(entity, key, stage)
        setattr(obj, key, value)


def assemble_stage(stage: str, tech: TechLibrary, pn: PhysicalNetlist, catalog: CellCatalog,
                   rc: ParasiticSet | None = None, timing: list[TimingPathRecord] | None = None,
                   qor: dict | None = None, grid_samples: dict[str, GridSamples] | None = None,
                   clock_source: str | None = None, run_status: str = "completed",
                   strap_pitch: int | None = None, scalar_k: int = SCALAR_K,
                   render_maps: bool = True, rudy: bool = True, w_m1: int | None = None
                   ) -> StageSnapshot:
    """Build a validated-for-availability snapshot of ``stage``.

    ``grid_samples`` maps ``ir_drop_vdd`` / ``ir_drop_vss`` / ``em_vdd`` / ``em_vss``
    to parsed gridded CSV samples. ``w_m1`` overrides the LEF metal-1 width (DBU).
    """
    w_m1 = w_m1 or tech.w_m1
    stage_index(stage)
    if rc is not None and rc.nets:
        require_available("net", "resistance", stage)
    for name in grid_samples or {}:
        require_available("pdn", name, stage)
    g = build_netlist_graph(pn, tech, catalog, rc, timing)
    _drop_early_geometry(g, stage)
    clock = None
    cng = None
    if clock_source is not None:
        clock = ClockTreeSummary(clock_source)
        if at_or_after(stage, "cts"):
            cng = extract_clock_network(g, clock_source, catalog)
            clock.no_of_buffers = cng.no_of_buffers
            clock.no_of_clock_sinks = cng.no_of_clock_sinks
    paths = build_timing_path_graphs(timing or [], g)
    summary = compute_summary(g, pn, catalog, stage)
    bundles = {
        "cell_metrics": compute_cell_metrics(g, catalog),
        "area_metrics": compute_area_metrics(g, catalog, pn.die_box, pn.dbu_per_micron),
        "power_metrics": PowerMetrics(),
        "timing_metrics": compute_timing_metrics(paths) or TimingMetrics(),
    }
    extras: dict = {}
    if qor:
        _apply_qor(qor, stage, bundles, summary, extras)
    power = bundles["power_metrics"]
    if power.total_power is None and None not in (power.internal_power, power.switching_power,
                                                  power.leakage_power):
        power.total_power = power.internal_power + power.switching_power + power.leakage_power
    snap = StageSnapshot(
        design=pn.design, stage=stage, dbu_per_micron=pn.dbu_per_micron, die_box=pn.die_box,
        core_box=pn.core_box, w_m1=w_m1, routing_layers=tuple(l.name for l in tech.routing_layers),
        netlist=g, summary=summary, run_status=run_status, clock=clock, clock_tree=cng,
        pdn=build_pdn(pn, strap_pitch), timing_paths=paths,
        cell_metrics=bundles["cell_metrics"], area_metrics=bundles["area_metrics"],
        power_metrics=None if _empty(power) else power,
        timing_metrics=None if _empty(bundles["timing_metrics"]) else bundles["timing_metrics"],
        extras=extras)
    if render_maps:
        snap.maps.update(render_all_maps(snap))
    if grid_samples:
        grid = make_grid(pn.core_box, w_m1, scalar_k, pn.dbu_per_micron)
        for name, samples in sorted(grid_samples.items()):
            agg = "max" if name.startswith("ir_drop") else "mean"
            snap.maps[f"pdn/{name}"] = grid_samples_to_scalar_map(
                samples, grid, agg, f"pdn/{name}", samples.value_unit)
    if rudy and at_or_after(stage, "detailed_route"):
        from .routability import rudy_for_snapshot
        for _, m in rudy_for_snapshot(snap, scalar_k).items():
            snap.maps[m.name] = m
    check_availability(snap)
    return snap


def _empty(bundle) -> bool:
    return all(getattr(bundle, f.name) is None for f in fields(bundle))


def render_all_maps(s: StageSnapshot) -> dict[str, SpatialMap]:
    out: dict[str, SpatialMap] = {}
    if at_or_after(s.stage, "global_place"):
        out.update(render_netlist_maps(s))
    if s.clock_tree is not None:
        out.update(render_clock_maps(s))
    if s.pdn is not None:
        out.update(render_pdn_maps(s))
    return out


# --- validation ----------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    path: str
    message: str


def _close(a: float, b: float, rel: float = 1e-9, abs_: float = 1e-9) -> bool:
    return math.isclose(a, b, rel_tol=rel, abs_tol=abs_)


def validate_snapshot(s: StageSnapshot) -> list[Violation]:
    """Every invariant breach, with an entity path. Empty means valid."""
    out = [Violation(p, m) for p, m in availability_breaches(s)]
    g = s.netlist
    cm = s.cell_metrics
    if cm is not None:
        parts = sum(getattr(cm, f) for f in _COUNT_FIELD.values())
        if parts != cm.no_of_total_cells:
            out.append(Violation("CellMetrics.no_of_total_cells",
                                 f"total {cm.no_of_total_cells} != sum of categories {parts}"))
        if cm.no_of_total_cells != len(g.gates):
            out.append(Violation("CellMetrics.no_of_total_cells",
                                 f"total {cm.no_of_total_cells} != gate count {len(g.gates)}"))
    am = s.area_metrics
    if am is not None:
        parts = math.fsum(getattr(am, f) for f in _AREA_FIELD.values())
        if not _close(parts, am.cell_area):
            out.append(Violation("AreaMetrics.cell_area", f"{am.cell_area} != category sum {parts}"))
        if am.total_area < am.cell_area:
            out.append(Violation("AreaMetrics.total_area", "total_area < cell_area"))
    pm = s.power_metrics
    if pm is not None and None not in (pm.total_power, pm.internal_power, pm.switching_power,
                                        pm.leakage_power):
        parts = pm.internal_power + pm.switching_power + pm.leakage_power
        if abs(pm.total_power - parts) > 0.01 * abs(pm.total_power):
            out.append(Violation("PowerMetrics.total_power",
                                 f"{pm.total_power} differs from component sum {parts} by more than 1%"))
    tm = s.timing_metrics
    if tm is not None:
        if None not in (tm.no_of_endpoints, tm.no_of_violating_endpoints) and \
                tm.no_of_violating_endpoints > tm.no_of_endpoints:
            out.append(Violation("TimingMetrics.no_of_violating_endpoints", "exceeds no_of_endpoints"))
        tns, ws = tm.total_negative_slack, tm.worst_slack
        if tns is not None and tns > 0:
            out.append(Violation("TimingMetrics.total_negative_slack", f"TNS {tns} > 0"))
        if tns is not None and ws is not None and tns <= 0 and (tns == 0) != (ws >= 0):
            out.append(Violation("TimingMetrics.total_negative_slack",
                                 f"TNS {tns} inconsistent with worst slack {ws}"))
    for table, kind in ((g.gates, "gates"), (g.pins, "pins"), (g.nets, "nets")):
        for name, node in table.items():
            if node.x_min is not None and (node.x_min > node.x_max or node.y_min > node.y_max):
                out.append(Violation(f"{kind}[{name}]", "inverted box"))
    for name, pin in g.pins.items():
        if pin.gate not in g.gates:
            out.append(Violation(f"pins[{name}]", f"gate {pin.gate} missing"))
    for key, m in s.maps.items():
        if m.name != key:
            out.append(Violation(f"maps[{key}]", f"name {m.name!r} does not match key"))
    r = s.routability
    if {"rudy_net", "rudy_net_long", "rudy_net_short"} <= r.keys():
        import numpy as np
        if not np.array_equal(r["rudy_net_long"].values + r["rudy_net_short"].values, r["rudy_net"].values):
            out.append(Violation("maps[routability_metrics/rudy_net]", "long + short != net"))
    if s.clock_tree is not None:
        for gate in s.clock_tree.gates:
            if gate not in g.gates:
                out.append(Violation(f"clock_tree.gates[{gate}]", "not in the parent netlist"))
    return out


def require_valid(s: StageSnapshot) -> None:
    v = validate_snapshot(s)
    if v:
        raise ValidationError(f"{len(v)} violation(s): " + "; ".join(f"{x.path}: {x.message}" for x in v[:5]), v)


__all__ = [
    "AreaMetrics", "CATEGORIES", "CellMetrics", "ClockTreeSummary", "DesignConstraint", "DesignFlow",
    "METRIC_BUNDLES", "NetlistSummary", "PdnModel", "PowerMetrics", "STAGES", "StageSnapshot",
    "TimingMetrics", "Violation", "assemble_stage", "availability_breaches", "build_pdn",
    "check_availability", "compute_area_metrics", "compute_cell_metrics", "compute_summary",
    "compute_timing_metrics", "render_all_maps", "require_valid", "validate_snapshot",
]
