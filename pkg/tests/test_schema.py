import copy

import pytest
from hypothesis import given
from hypothesis import strategies as st

from edaschema.errors import AvailabilityError, ValidationError
from edaschema.interchange import GridSample, GridSamples
from edaschema.schema import (DesignConstraint, DesignFlow, StageSnapshot, availability_breaches, build_pdn,
                              require_valid, validate_snapshot)
from edaschema.stages import AVAILABILITY, STAGES, is_available, window


# --- stage table ---------------------------------------------------------

def test_every_window_ends_at_final():
    for key, (first, last) in AVAILABILITY.items():
        assert last == "final", key
        assert first in STAGES


@pytest.mark.parametrize("entity,attr,first", [
    ("net", "hpwl", "global_place"), ("net", "length", "detailed_route"),
    ("netlist", "cell_placement_filler", "final"), ("clock_tree", "no_of_buffers", "cts"),
    ("pdn", "ir_drop_vdd", "detailed_route"), ("gate", "total_power", "floorplan"),
])
def test_window_samples(entity, attr, first):
    assert window(entity, attr)[0] == first
    i = STAGES.index(first)
    assert all(is_available(entity, attr, s) == (j >= i) for j, s in enumerate(STAGES))


# --- constraint and flow -------------------------------------------------

def test_constraint_validation():
    with pytest.raises(ValidationError):
        DesignConstraint(0.0)
    with pytest.raises(ValidationError):
        DesignConstraint(1.0, utilization=1.2)
    with pytest.raises(ValidationError):
        DesignConstraint(1.0, aspect_ratio=-1)


@given(st.floats(0.01, 10), st.sampled_from([0.5, 1.0, 1.5]), st.floats(0.05, 0.95))
def test_constraint_round_trip_and_hash(cp, ar, ut):
    c = DesignConstraint(cp, aspect_ratio=ar, utilization=ut, pdk="NG45")
    back = DesignConstraint.from_dict(c.to_dict())
    assert back == c and back.constraint_hash() == c.constraint_hash()
    assert len(c.constraint_hash()) == 16


def test_constraint_hash_separates_values():
    assert DesignConstraint(1.0).constraint_hash() != DesignConstraint(1.0, utilization=0.4).constraint_hash()


def test_flow_stage_order():
    DesignFlow("x", "d", stages=["floorplan", "cts", "final"])
    with pytest.raises(ValidationError):
        DesignFlow("x", "d", stages=["cts", "floorplan"])


# --- assembly ------------------------------------------------------------

def test_cell_and_area_metrics(four_gate, catalog):
    s = four_gate["final"]
    cm = s.cell_metrics
    assert (cm.no_of_combinational_cells, cm.no_of_buffers, cm.no_of_inverters, cm.no_of_total_cells) == \
        (2, 1, 1, 4)
    expect = sum(catalog[g.standard_cell].width * catalog[g.standard_cell].height
                 for g in s.netlist.gates.values())
    assert s.area_metrics.cell_area == pytest.approx(expect)
    assert s.area_metrics.total_area == pytest.approx(10.0 * 7.0)  # 20000 x 14000 DBU at 2000/um


def test_summary(four_gate):
    fp, dr = four_gate["floorplan"].summary, four_gate["detailed_route"].summary
    assert (dr.width, dr.height) == (10.0, 7.0)
    assert (dr.no_of_inputs, dr.no_of_outputs, dr.no_of_cells, dr.no_of_nets, dr.no_of_pins) == (1, 1, 4, 7, 10)
    assert dr.total_hpwl == pytest.approx(13.48)
    assert dr.total_wirelength == pytest.approx(14.7925)
    assert fp.total_hpwl is None and fp.utilization is None
    assert four_gate["global_place"].summary.total_wirelength is None


def test_timing_metrics(four_gate):
    tm = four_gate["cts"].timing_metrics
    assert tm.worst_slack == pytest.approx(0.0078)
    assert tm.worst_arrival_time == pytest.approx(0.4422)
    assert tm.total_negative_slack == 0.0 and tm.no_of_violating_endpoints == 0
    assert (tm.critical_path_startpoint, tm.critical_path_endpoint) == ("in1", "out1")


def test_geometry_dropped_before_window(four_gate):
    fp = four_gate["floorplan"]
    assert all(g.x_min is None for g in fp.netlist.gates.values())
    assert all(p.x is None for p in fp.netlist.ports.values())
    assert all(fp.netlist.nets[w.net].is_special_net for w in fp.netlist.wires)
    gr = four_gate["global_route"]
    assert all(n.length is None for n in gr.netlist.nets.values())
    assert gr.netlist.nets["n1"].hpwl is not None


def test_fixture_stages_are_valid(four_gate):
    for s in four_gate.values():
        assert validate_snapshot(s) == []
        require_valid(s)


def test_parasitics_before_route_rejected(make_stage, parasitics):
    with pytest.raises(AvailabilityError):
        make_stage("cts", rc=parasitics)


def test_qor_window_and_extras(make_stage):
    s = make_stage("cts", qor={"internal_power": 1.0, "switching_power": 2.0, "leakage_power": 0.5,
                               "design__foo": 3})
    assert s.power_metrics.total_power == pytest.approx(3.5)
    assert s.extras == {"design__foo": 3}
    with pytest.raises(AvailabilityError):
        make_stage("cts", qor={"total_wirelength": 10.0})


def test_ir_map_only_after_route(make_stage):
    gs = GridSamples([GridSample(2.0, 2.0, 1.5)], value_unit="mV")
    with pytest.raises(AvailabilityError):
        make_stage("cts", grid_samples={"ir_drop_vdd": gs})
    s = make_stage("final", grid_samples={"ir_drop_vdd": gs})
    m = s.maps["pdn/ir_drop_vdd"]
    assert m.values.max() == 1.5 and m.mask.sum() == 1


def test_rudy_maps_in_late_snapshots(four_gate):
    assert set(four_gate["final"].routability) == {"rudy_net", "rudy_pin", "rudy_net_long", "rudy_net_short"}
    assert not four_gate["global_route"].routability


def test_snapshot_construction_checks_windows(four_gate):
    s = four_gate["floorplan"]
    g = copy.deepcopy(s.netlist)
    g.nets["n1"].length = 1.0
    with pytest.raises(AvailabilityError):
        StageSnapshot(s.design, s.stage, s.dbu_per_micron, s.die_box, s.core_box, s.w_m1,
                      s.routing_layers, g)


def test_validation_reports_paths(four_gate):
    s = copy.deepcopy(four_gate["final"])
    s.cell_metrics.no_of_buffers += 1
    s.area_metrics.total_area = 0.0
    s.netlist.gates["u1"].x_max = s.netlist.gates["u1"].x_min - 1
    paths = {v.path for v in validate_snapshot(s)}
    assert "CellMetrics.no_of_total_cells" in paths
    assert "AreaMetrics.total_area" in paths
    assert "gates[u1]" in paths
    with pytest.raises(ValidationError) as exc:
        require_valid(s)
    assert len(exc.value.violations) >= 3


def test_validation_rudy_partition(four_gate):
    s = copy.deepcopy(four_gate["final"])
    s.maps["routability_metrics/rudy_net"].values[0, 0] += 1.0
    assert any("long + short" in v.message for v in validate_snapshot(s))


def test_breaches_listed_not_raised(four_gate):
    s = copy.deepcopy(four_gate["floorplan"])
    s.netlist.gates["u1"].ir_drop_vdd = 0.1
    assert availability_breaches(s)[0][0] == "gates[u1].ir_drop_vdd"


def test_pdn_model(physical):
    pdn = build_pdn(physical)
    assert pdn.vdd_nets == ["VDD"] and pdn.vss_nets == ["VSS"]
    assert pdn.strap_pitch == 8000  # VDD stripes at x = 4000 and 12000
    assert pdn.voltage_sources == [(1140.0, 1400.0)]
    assert build_pdn(physical, strap_pitch=2000).voltage_sources[:2] == [(1140.0, 1400.0), (5140.0, 1400.0)]
