import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from edaschema.errors import AvailabilityError, UndefinedError
from edaschema.geometry import Rect
from edaschema.interchange import GridSample, GridSamples
from edaschema.raster import (GridSpec, ScalarMap, SpatialMap, grid_samples_to_scalar_map, make_grid,
                              point_tiles, rasterize_points, rasterize_rects, render_clock_maps,
                              render_netlist_maps, render_pdn_maps)
from oracles import grid_dims, raster_oracle


def test_grid_ceiling_resolution():
    g = make_grid(Rect(0, 0, 1001, 700), 10, 1)
    assert g.shape == (70, 101)
    g50 = g.with_k(50)
    assert g50.shape == (2, 3) and g50.pixel == 500


def test_grid_rejects_bad_inputs():
    with pytest.raises(ValueError):
        make_grid(Rect(0, 0, 0, 10), 10)
    with pytest.raises(ValueError):
        GridSpec(0, 0, 10, 10, 0)
    with pytest.raises(ValueError):
        GridSpec(0, 0, 10, 10, 1, k=0)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 10**6), st.integers(1, 10**6), st.integers(1, 500), st.integers(1, 100))
def test_grid_dims_property(length, width, w_m1, k):
    g = GridSpec(0, 0, length, width, w_m1, k)
    assert (g.res_x, g.res_y) == grid_dims(length, width, w_m1, k)
    # the extent covers the core with less than one pixel of slack
    assert 0 <= g.res_x * g.pixel - length < g.pixel


_rect = st.tuples(st.integers(-30, 130), st.integers(-30, 130), st.integers(0, 60), st.integers(0, 60)) \
    .map(lambda t: Rect(t[0], t[1], t[0] + t[2], t[1] + t[3]))


@settings(max_examples=100, deadline=None)
@given(st.lists(_rect, max_size=12), st.integers(1, 15))
def test_rasterize_matches_oracle(rects, pixel):
    g = GridSpec(3, -2, 100, 90, pixel)
    got = rasterize_rects(rects, g).bits
    want = raster_oracle([(r.x0, r.y0, r.x1, r.y1) for r in rects], 3, -2, pixel, g.res_x, g.res_y)
    assert got.tolist() == want


def test_touching_edge_does_not_mark_neighbor():
    g = GridSpec(0, 0, 40, 40, 10)
    bits = rasterize_rects([Rect(0, 0, 10, 10)], g).bits
    assert bits.sum() == 1 and bits[0, 0]


def test_row_zero_is_bottom():
    g = GridSpec(0, 0, 40, 40, 10)
    bits = rasterize_rects([Rect(0, 30, 10, 40)], g).bits
    assert bits[3, 0] and not bits[0, 0]


def test_points_far_edge_lands_in_last_tile():
    g = GridSpec(0, 0, 40, 40, 10)
    rows, cols, inside = point_tiles(np.array([40.0, 0.0, 41.0]), np.array([40.0, 0.0, 5.0]), g)
    assert inside.tolist() == [True, True, False]
    assert (rows[0], cols[0]) == (3, 3)
    assert rasterize_points([(40, 40)], g).bits[3, 3]


def test_spatial_map_or_and_shape_check():
    g = GridSpec(0, 0, 20, 20, 10)
    a = SpatialMap("a", g, np.array([[True, False], [False, False]]))
    b = SpatialMap("a", g, np.array([[False, False], [False, True]]))
    assert (a | b).count == 2
    with pytest.raises(ValueError):
        SpatialMap("x", g, np.zeros((3, 3), bool))


def test_scalar_map_rejects_nan():
    g = GridSpec(0, 0, 20, 20, 10)
    with pytest.raises(ValueError):
        ScalarMap("x", g, np.array([[np.nan, 0], [0, 0]]))


def test_grid_samples_mean_and_mask():
    g = GridSpec(0, 0, 2000, 2000, 1000, dbu_per_micron=1000)  # 1 um tiles, 2x2
    gs = GridSamples([GridSample(0.2, 0.2, 1.0), GridSample(0.8, 0.5, 3.0), GridSample(1.5, 1.5, 7.0)],
                     value_unit="mV")
    m = grid_samples_to_scalar_map(gs, g, name="pdn/ir_drop_vdd")
    assert m.values[0, 0] == 2.0 and m.values[1, 1] == 7.0
    assert m.mask.tolist() == [[True, False], [False, True]]
    assert m.unit == "mV"
    mx = grid_samples_to_scalar_map(gs, g, "max")
    assert mx.values[0, 0] == 3.0


def test_grid_samples_all_outside():
    g = GridSpec(0, 0, 2000, 2000, 1000)
    with pytest.raises(UndefinedError):
        grid_samples_to_scalar_map(GridSamples([GridSample(50, 50, 1)]), g)


def test_per_layer_or_identity(four_gate):
    for stage in ("detailed_route", "final"):
        maps = render_netlist_maps(four_gate[stage])
        layers = [m for k, m in maps.items() if "/routing_by_metal_layers/" in k]
        union = np.logical_or.reduce([m.bits for m in layers])
        assert np.array_equal(union, maps["netlist/routing"].bits)
        assert maps["netlist/routing"].count > 0


def test_netlist_map_windows(four_gate):
    fp = render_netlist_maps(four_gate["floorplan"])
    assert "netlist/routing" not in fp and "netlist/cell_placement" not in fp
    gp = render_netlist_maps(four_gate["global_place"])
    assert gp["netlist/cell_placement"].count > 0
    with pytest.raises(AvailabilityError):
        render_netlist_maps(four_gate["floorplan"], ["routing"])


def test_cell_placement_categories_partition(four_gate):
    maps = render_netlist_maps(four_gate["final"])
    comb = maps["netlist/cell_placement_combinational"].bits
    seq = maps["netlist/cell_placement_sequential"].bits
    assert not seq.any()  # no flops in the four-gate design
    assert np.array_equal(comb, maps["netlist/cell_placement"].bits)


def test_pdn_maps(four_gate):
    maps = render_pdn_maps(four_gate["final"])
    assert maps["pdn/pdn_routing_vdd"].count > 0 and maps["pdn/pdn_routing_vss"].count > 0
    assert maps["pdn/voltage_source"].count >= 1


def test_clock_maps_need_clock_tree(four_gate, synth_stages):
    with pytest.raises(AvailabilityError):
        render_clock_maps(four_gate["cts"])
    maps = render_clock_maps(synth_stages[0])
    assert maps["clock_tree/cell_placement_sequential"].count > 0
    seq = maps["clock_tree/cell_placement_sequential"].bits
    assert not (seq & ~maps["clock_tree/cell_placement"].bits).any()
