"""Netlist graph (gates, pins, nets, ports), clock network, and timing path graphs.

Node boxes are kept in DBU: integer corners for gates and pins (placed LEF
geometry), float centers for ports and net boxes (pin centers can fall on
half units). Lengths (``hpwl``, ``length``) are in microns.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field

import networkx as nx

from .errors import ResolutionError, TimingGraphError, UndefinedError
from .geometry import Rect, place_rect, placed_size
from .interchange.def_ import PhysicalNetlist
from .interchange.lef import TechLibrary
from .interchange.liberty import CellCatalog
from .interchange.spef import ParasiticSet
from .interchange.sta import TimingPathRecord

logger = logging.getLogger(__name__)

_EDGES = {"rise": "rise", "fall": "fall"}


@dataclass
class GateNode:
    name: str
    standard_cell: str
    category: str
    no_of_inputs: int
    no_of_outputs: int
    orient: str = "N"
    x_min: int | None = None
    y_min: int | None = None
    x_max: int | None = None
    y_max: int | None = None
    internal_power: float | None = None
    switching_power: float | None = None
    leakage_power: float | None = None
    total_power: float | None = None
    ir_drop_vdd: float | None = None
    ir_drop_vss: float | None = None

    @property
    def box(self) -> Rect | None:
        if self.x_min is None:
            return None
        return Rect(self.x_min, self.y_min, self.x_max, self.y_max)


@dataclass
class PinNode:
    name: str  # "instance/pin"
    gate: str
    pin: str
    direction: str
    net: str | None = None
    x_min: int | None = None
    y_min: int | None = None
    x_max: int | None = None
    y_max: int | None = None
    is_startpoint: bool = False
    is_endpoint: bool = False
    setup_rise_slew: float | None = None
    setup_fall_slew: float | None = None
    hold_rise_slew: float | None = None
    hold_fall_slew: float | None = None
    setup_rise_slack: float | None = None
    setup_fall_slack: float | None = None
    hold_rise_slack: float | None = None
    hold_fall_slack: float | None = None
    load_capacitance: float | None = None
    switching_activity: float | None = None

    @property
    def box(self) -> Rect | None:
        if self.x_min is None:
            return None
        return Rect(self.x_min, self.y_min, self.x_max, self.y_max)

    @property
    def center(self) -> tuple[float, float] | None:
        if self.x_min is None:
            return None
        return (self.x_min + self.x_max) / 2, (self.y_min + self.y_max) / 2


@dataclass
class NetNode:
    name: str
    is_special_net: bool = False
    use: str | None = None
    no_of_fanouts: int = 0
    x_min: float | None = None
    y_min: float | None = None
    x_max: float | None = None
    y_max: float | None = None
    hpwl: float | None = None  # um
    length: float | None = None  # um
    resistance: float | None = None  # ohm
    capacitance: float | None = None  # fF
    total_coupling_capacitance: float | None = None  # fF


@dataclass
class PortNode:
    name: str
    direction: str
    net: str | None = None
    x: float | None = None  # DBU, center of the port shape
    y: float | None = None


@dataclass(frozen=True)
class Wire:
    net: str
    layer: str
    x_min: int
    y_min: int
    x_max: int
    y_max: int
    length: int  # center-line DBU

    @property
    def rect(self) -> Rect:
        return Rect(self.x_min, self.y_min, self.x_max, self.y_max)


@dataclass
class NetlistGraph:
    design: str
    dbu_per_micron: int
    gates: dict[str, GateNode] = field(default_factory=dict)
    pins: dict[str, PinNode] = field(default_factory=dict)
    nets: dict[str, NetNode] = field(default_factory=dict)
    ports: dict[str, PortNode] = field(default_factory=dict)
    edges: list[tuple[str, str, str]] = field(default_factory=list)  # (kind, src id, dst id)
    wires: list[Wire] = field(default_factory=list)

    def net_members(self, net: str) -> tuple[list[PinNode], list[PortNode]]:
        pins = [self.pins[e[1][4:]] for e in self.edges if e[0] == "pin_net" and e[2] == "net:" + net]
        ports = [self.ports[e[1][5:]] for e in self.edges if e[0] == "port_net" and e[2] == "net:" + net]
        return pins, ports

    def members_by_net(self) -> dict[str, tuple[list[PinNode], list[PortNode]]]:
        out: dict[str, tuple[list[PinNode], list[PortNode]]] = {n: ([], []) for n in self.nets}
        for kind, src, dst in self.edges:
            if kind == "pin_net":
                out[dst[4:]][0].append(self.pins[src[4:]])
            elif kind == "port_net":
                out[dst[4:]][1].append(self.ports[src[5:]])
        return out

    def pins_of_gate(self, gate: str) -> list[PinNode]:
        return [p for p in self.pins.values() if p.gate == gate]

    def node(self, node_id: str):
        kind, _, name = node_id.partition(":")
        return {"gate": self.gates, "pin": self.pins, "net": self.nets, "port": self.ports}[kind][name]

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        for kind, table in (("gate", self.gates), ("pin", self.pins), ("net", self.nets),
                            ("port", self.ports)):
            for name, node in table.items():
                g.add_node(f"{kind}:{name}", type=kind, data=node)
        for kind, a, b in self.edges:
            g.add_edge(a, b, kind=kind)
        return g

    def to_microns(self, dbu: float) -> float:
        return dbu / self.dbu_per_micron


def _sink(pin: PinNode) -> bool:
    return pin.direction == "INPUT"


def build_netlist_graph(pn: PhysicalNetlist, tech: TechLibrary, catalog: CellCatalog,
                        rc: ParasiticSet | None = None,
                        timing: list[TimingPathRecord] | None = None) -> NetlistGraph:
    """Assemble the heterogeneous netlist graph from parsed artifacts."""
    g = NetlistGraph(pn.design, pn.dbu_per_micron)
    placed_origin: dict[str, tuple[int, int]] = {}
    for comp in pn.components:
        if comp.cell not in catalog:
            raise ResolutionError(f"cell {comp.cell} of {comp.name} is not in the catalog")
        cell = catalog[comp.cell]
        macro = tech.macros[comp.cell]
        node = GateNode(comp.name, comp.cell, cell.category, len(cell.inputs), len(cell.outputs),
                        comp.orient)
        if comp.is_placed:
            w, h = placed_size(macro.width, macro.height, comp.orient)
            node.x_min, node.y_min = comp.x, comp.y
            node.x_max, node.y_max = comp.x + w, comp.y + h
            placed_origin[comp.name] = (comp.x, comp.y)
        g.gates[comp.name] = node
    comp_cell = {c.name: c.cell for c in pn.components}
    for port in pn.ports:
        c = port.center
        g.ports[port.name] = PortNode(port.name, port.direction, port.net,
                                      c[0] if c else None, c[1] if c else None)
    for net in pn.nets:
        node = NetNode(net.name, net.is_special, net.use)
        g.nets[net.name] = node
        for inst, pin_name in net.connections:
            if inst == "*":
                continue
            if inst == "PIN":
                if pin_name not in g.ports:
                    raise ResolutionError(f"net {net.name} references missing port {pin_name}")
                g.ports[pin_name].net = net.name
                g.edges.append(("port_net", "port:" + pin_name, "net:" + net.name))
                continue
            if inst not in g.gates:
                raise ResolutionError(f"net {net.name} references missing instance {inst}")
            pid = f"{inst}/{pin_name}"
            pin = g.pins.get(pid)
            if pin is None:
                macro = tech.macros[comp_cell[inst]]
                mpin = macro.pins.get(pin_name)
                if mpin is None:
                    raise ResolutionError(f"cell {macro.name} has no pin {pin_name}")
                pin = PinNode(pid, inst, pin_name, mpin.direction.upper())
                gate = g.gates[inst]
                if inst in placed_origin:
                    local = mpin.bbox or Rect(0, 0, macro.width, macro.height)
                    r = place_rect(local, macro.width, macro.height, gate.orient,
                                   placed_origin[inst])
                    pin.x_min, pin.y_min, pin.x_max, pin.y_max = r.x0, r.y0, r.x1, r.y1
                g.pins[pid] = pin
                g.edges.append(("gate_pin", "gate:" + inst, "pin:" + pid))
            elif pin.net is not None and pin.net != net.name:
                raise ResolutionError(f"pin {pid} is on both {pin.net} and {net.name}")
            pin.net = net.name
            g.edges.append(("pin_net", "pin:" + pid, "net:" + net.name))
        for seg in net.segments:
            r = seg.rect
            g.wires.append(Wire(net.name, seg.layer, r.x0, r.y0, r.x1, r.y1, seg.length))
        if net.segments:
            node.length = net.routed_length / pn.dbu_per_micron
    for name, (pins, ports) in g.members_by_net().items():
        node = g.nets[name]
        node.no_of_fanouts = sum(1 for p in pins if _sink(p)) + sum(
            1 for p in ports if p.direction == "OUTPUT")
        pts = [p.center for p in pins if p.center is not None]
        pts += [(p.x, p.y) for p in ports if p.x is not None]
        if pts:
            xs = [p[0] for p in pts]
            ys = [p[1] for p in pts]
            node.x_min, node.y_min, node.x_max, node.y_max = min(xs), min(ys), max(xs), max(ys)
            node.hpwl = ((node.x_max - node.x_min) + (node.y_max - node.y_min)) / pn.dbu_per_micron
    if rc is not None:
        for name, par in rc.nets.items():
            if name not in g.nets:
                raise ResolutionError(f"SPEF net {name} does not exist in the netlist")
            node = g.nets[name]
            node.resistance = par.total_resistance
            node.capacitance = par.total_capacitance
            node.total_coupling_capacitance = par.total_coupling_capacitance
    if timing:
        annotate_pin_timing(g, timing)
    return g


def annotate_pin_timing(g: NetlistGraph, records: list[TimingPathRecord]) -> None:
    """Pin slack/slew per check type and edge (worst path wins), start/end flags, loads."""
    for rec in records:
        pts = rec.points
        for i, pt in enumerate(pts):
            pin = g.pins.get(pt.pin)
            if pin is None:
                continue
            if i == 0:
                pin.is_startpoint = True
            if i == len(pts) - 1:
                pin.is_endpoint = True
            edge = _EDGES.get(pt.edge or "")
            if edge is not None:
                slack_attr = f"{rec.check_type}_{edge}_slack"
                current = getattr(pin, slack_attr)
                if current is None or rec.slack < current:
                    setattr(pin, slack_attr, rec.slack)
                    if pt.slew is not None:
                        setattr(pin, f"{rec.check_type}_{edge}_slew", pt.slew)
            if pt.kind == "net_arc" and pt.capacitance is not None and i > 0:
                driver = g.pins.get(pts[i - 1].pin)
                if driver is not None:
                    driver.load_capacitance = pt.capacitance


def net_hpwl(g: NetlistGraph, net: str) -> float:
    """Half-perimeter of the connected pin/port centers, in microns."""
    pins, ports = g.net_members(net)
    pts = [p.center for p in pins if p.center is not None]
    pts += [(p.x, p.y) for p in ports if p.x is not None]
    if not pts:
        raise UndefinedError(f"net {net} has no placed pins")
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    return ((max(xs) - min(xs)) + (max(ys) - min(ys))) / g.dbu_per_micron


# --- clock network -------------------------------------------------------

@dataclass
class ClockNetworkGraph:
    clock_source: str
    gates: list[str] = field(default_factory=list)
    pins: list[str] = field(default_factory=list)
    nets: list[str] = field(default_factory=list)
    ports: list[str] = field(default_factory=list)
    buffers: list[str] = field(default_factory=list)  # buffer and inverter gates
    sinks: list[str] = field(default_factory=list)  # sequential clock pins
    edges: list[tuple[str, str, str]] = field(default_factory=list)
    parent: NetlistGraph | None = field(default=None, compare=False, repr=False)

    @property
    def no_of_buffers(self) -> int:
        return len(self.buffers)

    @property
    def no_of_clock_sinks(self) -> int:
        return len(self.sinks)

    @property
    def is_empty(self) -> bool:
        return not self.sinks

    def sink_gates(self) -> list[str]:
        return sorted({s.rsplit("/", 1)[0] for s in self.sinks})


def extract_clock_network(g: NetlistGraph, clock_source: str, catalog: CellCatalog
                          ) -> ClockNetworkGraph:
    """BFS from ``clock_source`` (port name or pin id) through buffers and inverters."""
    cng = ClockNetworkGraph(clock_source, parent=g)
    by_net = g.members_by_net()
    if clock_source in g.ports:
        cng.ports.append(clock_source)
        start_net = g.ports[clock_source].net
    elif clock_source in g.pins:
        cng.pins.append(clock_source)
        start_net = g.pins[clock_source].net
    else:
        raise ResolutionError(f"clock source {clock_source} not found")
    seen_nets: set[str] = set()
    queue = deque([start_net] if start_net else [])
    while queue:
        net = queue.popleft()
        if net in seen_nets:
            continue
        seen_nets.add(net)
        cng.nets.append(net)
        pins, ports = by_net[net]
        for port in ports:
            if port.name not in cng.ports:
                cng.ports.append(port.name)
            cng.edges.append(("port_net", "port:" + port.name, "net:" + net))
        for pin in pins:
            cng.edges.append(("pin_net", "pin:" + pin.name, "net:" + net))
            if pin.name not in cng.pins:
                cng.pins.append(pin.name)
            if not _sink(pin):
                continue
            gate = g.gates[pin.gate]
            cell = catalog[gate.standard_cell]
            if gate.category in ("buffer", "inverter"):
                if gate.name not in cng.gates:
                    cng.gates.append(gate.name)
                    cng.buffers.append(gate.name)
                cng.edges.append(("gate_pin", "gate:" + gate.name, "pin:" + pin.name))
                for out in g.pins_of_gate(gate.name):
                    if out.direction == "OUTPUT" and out.net is not None:
                        if out.name not in cng.pins:
                            cng.pins.append(out.name)
                            cng.edges.append(("gate_pin", "gate:" + gate.name, "pin:" + out.name))
                        queue.append(out.net)
            elif cell.is_sequential and cell.pins.get(pin.pin) is not None and cell.pins[pin.pin].is_clock:
                if gate.name not in cng.gates:
                    cng.gates.append(gate.name)
                cng.sinks.append(pin.name)
                cng.edges.append(("gate_pin", "gate:" + gate.name, "pin:" + pin.name))
    if not cng.sinks:
        logger.warning("clock network from %s reaches no sequential sinks", clock_source)
    return cng


# --- timing path graphs --------------------------------------------------

@dataclass(frozen=True)
class PathNode:
    kind: str  # pin | port | cell_arc | net_arc
    name: str  # pin name, or "driver->sink" for arcs
    delay: float | None = None
    arrival: float | None = None
    slew: float | None = None  # at the sink of an arc, or at the pin
    capacitance: float | None = None  # net arcs only
    resolved: bool = True


@dataclass
class TimingPathGraph:
    startpoint: str
    endpoint: str
    path_type: str  # setup | hold
    arrival_time: float
    required_time: float
    slack: float
    nodes: list[PathNode] = field(default_factory=list)
    is_critical_path: bool = False
    path_group: str | None = None

    @property
    def key(self) -> tuple[str, str, str]:
        return self.startpoint, self.endpoint, self.path_type

    @property
    def no_of_pins(self) -> int:
        return sum(1 for n in self.nodes if n.kind in ("pin", "port"))

    @property
    def arcs(self) -> list[tuple[str, str, PathNode]]:
        """(driver pin, sink pin, arc node) in path order."""
        out = []
        for i, n in enumerate(self.nodes):
            if n.kind in ("cell_arc", "net_arc"):
                out.append((self.nodes[i - 1].name, self.nodes[i + 1].name, n))
        return out

    @property
    def unresolved(self) -> list[str]:
        return [n.name for n in self.nodes if not n.resolved]

    def to_networkx(self) -> nx.DiGraph:
        g = nx.DiGraph()
        for i, n in enumerate(self.nodes):
            g.add_node(i, kind=n.kind, name=n.name, delay=n.delay, arrival=n.arrival,
                       slew=n.slew, capacitance=n.capacitance)
            if i:
                g.add_edge(i - 1, i)
        return g


def build_timing_path_graph(rec: TimingPathRecord, g: NetlistGraph | None = None,
                            critical: bool = False) -> TimingPathGraph:
    tpg = TimingPathGraph(rec.startpoint, rec.endpoint, rec.check_type, rec.arrival_time,
                          rec.required_time, rec.slack, is_critical_path=critical,
                          path_group=rec.path_group)
    last_kind = None
    for i, pt in enumerate(rec.points):
        is_port = pt.cell in ("in", "out", "inout") or "/" not in pt.pin
        resolved = g is None or (pt.pin in g.ports if is_port else pt.pin in g.pins)
        if i > 0:
            if pt.kind not in ("cell_arc", "net_arc"):
                raise TimingGraphError(f"point {pt.pin} has kind {pt.kind!r} after the start")
            if pt.kind == last_kind:
                raise TimingGraphError(
                    f"path {rec.startpoint} -> {rec.endpoint}: two consecutive {pt.kind}s at {pt.pin}")
            last_kind = pt.kind
            prev = rec.points[i - 1].pin
            tpg.nodes.append(PathNode(pt.kind, f"{prev}->{pt.pin}", pt.delay, pt.arrival, pt.slew,
                                      pt.capacitance if pt.kind == "net_arc" else None))
        tpg.nodes.append(PathNode("port" if is_port else "pin", pt.pin, None, pt.arrival, pt.slew,
                                  None, resolved))
    if rec.points and abs(rec.points[-1].arrival - rec.arrival_time) > 1e-3:
        raise TimingGraphError(
            f"path {rec.startpoint} -> {rec.endpoint}: last point arrival "
            f"{rec.points[-1].arrival} differs from path arrival {rec.arrival_time}")
    return tpg


def build_timing_path_graphs(records: list[TimingPathRecord], g: NetlistGraph | None = None
                             ) -> list[TimingPathGraph]:
    """All paths of one stage; ties at the per-check-type minimum slack are all critical."""
    worst: dict[str, float] = {}
    for r in records:
        worst[r.check_type] = min(worst.get(r.check_type, r.slack), r.slack)
    return [build_timing_path_graph(r, g, r.slack == worst[r.check_type]) for r in records]

