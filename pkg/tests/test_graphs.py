import pytest

from edaschema.errors import ResolutionError, TimingGraphError, UndefinedError
from edaschema.graphs import (build_netlist_graph, build_timing_path_graph, build_timing_path_graphs,
                              extract_clock_network, net_hpwl)
from edaschema.interchange import TimingPathRecord, TimingPoint


@pytest.fixture(scope="module")
def graph(tech, catalog, physical, parasitics, timing):
    return build_netlist_graph(physical, tech, catalog, parasitics, timing)


def _pin_center(tech, comp, pin):
    """Independent pin-center computation for N and FS placements only."""
    m = tech.macros[comp.cell]
    box = m.pins[pin].bbox
    cx, cy = (box.x0 + box.x1) / 2, (box.y0 + box.y1) / 2
    if comp.orient == "N":
        return comp.x + cx, comp.y + cy
    assert comp.orient == "FS"
    return comp.x + cx, comp.y + m.height - cy


def test_graph_counts(graph):
    assert len(graph.gates) == 4
    assert len(graph.nets) == 7  # five signal nets plus VDD, VSS
    assert len(graph.ports) == 2
    assert len(graph.pins) == 10
    assert {n for n, v in graph.nets.items() if v.is_special_net} == {"VDD", "VSS"}


def test_gate_boxes_follow_orientation(graph, tech):
    u3 = graph.gates["u3"]
    m = tech.macros["BUF_X1"]
    assert (u3.x_min, u3.y_min, u3.x_max, u3.y_max) == (7220, 4200, 7220 + m.width, 4200 + m.height)
    assert u3.category == "buffer" and u3.orient == "FS"


def test_hpwl_matches_hand_oracle(graph, tech, physical):
    comps = physical.component_map()
    ports = physical.port_map()
    total = 0.0
    for net in physical.nets:
        if net.is_special:
            continue
        pts = []
        for inst, pin in net.connections:
            if inst == "PIN":
                pts.append(ports[pin].center)
            else:
                pts.append(_pin_center(tech, comps[inst], pin))
        xs, ys = zip(*pts)
        expect = (max(xs) - min(xs) + max(ys) - min(ys)) / 2000
        assert net_hpwl(graph, net.name) == pytest.approx(expect, abs=1e-12)
        assert graph.nets[net.name].hpwl == pytest.approx(expect, abs=1e-12)
        total += expect
    assert total == pytest.approx(13.48, abs=1e-9)


def test_fanout_and_parasitics(graph):
    assert graph.nets["n2"].no_of_fanouts == 2
    assert graph.nets["in1"].no_of_fanouts == 2
    assert graph.nets["n1"].capacitance == pytest.approx(1.33)
    assert graph.nets["n1"].resistance == pytest.approx(57.8)


def test_pin_timing_annotation(graph):
    # u4/ZN is on the worst setup path (falling)
    assert graph.pins["u4/ZN"].setup_fall_slack == pytest.approx(0.0078)
    assert graph.pins["u1/A"].is_endpoint is False


def test_networkx_export(graph):
    nxg = graph.to_networkx()
    assert nxg.number_of_nodes() == len(graph.gates) + len(graph.pins) + len(graph.nets) + len(graph.ports)
    assert nxg.number_of_edges() == len(graph.edges)


def test_hpwl_unplaced_is_undefined(tech, catalog, physical):
    from dataclasses import replace
    pn = replace(physical, components=[replace(c, status="UNPLACED", x=None, y=None)
                                       for c in physical.components],
                 ports=[replace(p, status="UNPLACED", x=None, y=None) for p in physical.ports])
    g = build_netlist_graph(pn, tech, catalog)
    with pytest.raises(UndefinedError):
        net_hpwl(g, "n1")


def test_clock_network_on_synthetic(synth_stages):
    s = synth_stages[0]
    cng = s.clock_tree
    assert cng.no_of_clock_sinks == 190  # every tenth of 1900 cells is a flop
    assert cng.no_of_buffers == 10  # root plus nine leaves
    assert all(p.endswith("/CK") for p in cng.sinks)
    assert set(cng.sink_gates()) <= set(cng.gates)


def test_clock_source_must_exist(graph, catalog):
    with pytest.raises(ResolutionError):
        extract_clock_network(graph, "no_such_clock", catalog)


def test_timing_path_graph_alternates(graph, timing):
    tpg = build_timing_path_graph(timing[0], graph)
    kinds = [n.kind for n in tpg.nodes]
    assert kinds[0] == "port" and kinds[-1] == "port"
    for a, b in zip(kinds, kinds[1:]):
        assert (a in ("pin", "port")) != (b in ("pin", "port"))
    assert not tpg.unresolved
    assert tpg.no_of_pins == len(timing[0].points)


def test_critical_flags(timing):
    graphs = build_timing_path_graphs(timing)
    crit = [t for t in graphs if t.is_critical_path]
    assert {t.path_type for t in crit} == {"setup", "hold"}
    setup = next(t for t in crit if t.path_type == "setup")
    assert setup.slack == pytest.approx(0.0078)


def test_consecutive_arcs_rejected():
    pts = (TimingPoint("in0", "start", None, 0.0, cell="in"),
           TimingPoint("u1/A", "net_arc", 0.1, 0.1),
           TimingPoint("u1/Z", "net_arc", 0.1, 0.2))
    rec = TimingPathRecord("in0", "u1/Z", "setup", 0.2, 1.0, 0.8, pts)
    with pytest.raises(TimingGraphError):
        build_timing_path_graph(rec)
