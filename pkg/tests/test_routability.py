import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from edaschema.errors import AvailabilityError
from edaschema.raster import GridSpec
from edaschema.routability import (NetBox, clamp_box, classify_net_span, compute_rudy_maps, net_contribution,
                                   rudy_for_snapshot)
from oracles import rudy_oracle


def _grid(nx=8, ny=6, pixel=100, dbu=1000):
    return GridSpec(0, 0, nx * pixel, ny * pixel, pixel, 1, dbu)


def test_single_tile_net_is_short():
    g = _grid()
    maps = compute_rudy_maps([NetBox(110, 120, 180, 170, ((110, 120), (180, 170)))], g)
    assert not maps.rudy_net_long.values.any()
    assert np.array_equal(maps.rudy_net_short.values, maps.rudy_net.values)


def test_exact_tile_cover_value():
    # a box equal to one tile of side s puts (2s/s^2) * s^2 = 2s DBU in that tile
    g = _grid(pixel=100, dbu=1000)
    maps = compute_rudy_maps([NetBox(100, 100, 200, 200)], g)
    assert maps.rudy_net.values[1, 1] == pytest.approx(2 * 100 / 1000)
    assert maps.rudy_net.values.sum() == pytest.approx(0.2)
    assert maps.rudy_net.unit == "um" and maps.rudy_pin.unit == "1/um"


def test_degenerate_box_clamped_to_one_pixel():
    assert clamp_box(150, 150, 150, 150, 100) == (100, 100, 200, 200)
    contrib, is_long, dens = net_contribution(NetBox(150, 150, 150, 150), _grid())
    assert dens == pytest.approx(2 / 100)
    assert not is_long and contrib[1, 1] == pytest.approx(200)


def test_span_classification_on_boundaries():
    g = _grid()
    assert classify_net_span((100, 100, 200, 200), g) == "short"
    assert classify_net_span((100, 100, 201, 200), g) == "long"
    assert classify_net_span((150, 150, 150, 150), g) == "short"
    assert classify_net_span((190, 150, 195, 150), g) == "short"  # widened box would straddle
    assert classify_net_span((150, 150, 150, 260), g) == "long"


def test_pin_map_counts_pins_with_net_density():
    g = _grid()
    box = NetBox.from_pins([(50, 50), (250, 50), (250, 250)])
    maps = compute_rudy_maps([box], g)
    dens = (200 + 200) / (200 * 200)
    assert maps.rudy_pin.values[0, 0] == pytest.approx(dens * 1000)
    assert maps.rudy_pin.values[2, 2] == pytest.approx(dens * 1000)
    assert maps.rudy_pin.values.sum() == pytest.approx(3 * dens * 1000)


def test_net_outside_grid_contributes_nothing(caplog):
    maps = compute_rudy_maps([NetBox(5000, 5000, 6000, 6000)], _grid())
    assert not maps.rudy_net.values.any()
    assert "outside" in caplog.text


def _random_layout(rng, nx, ny, pixel, n_nets):
    nets = []
    for _ in range(n_nets):
        n_pins = rng.randint(1, 5)
        pins = [(rng.uniform(-0.2, nx + 0.2) * pixel, rng.uniform(-0.2, ny + 0.2) * pixel)
                for _ in range(n_pins)]
        if rng.random() < 0.2:  # snap some pins to tile edges
            pins = [(round(x / pixel) * pixel, round(y / pixel) * pixel) for x, y in pins]
        nets.append(NetBox.from_pins(pins))
    return nets


def test_matches_bruteforce_oracle():
    rng = random.Random(11)
    for _ in range(40):
        nx, ny, pixel = rng.randint(1, 16), rng.randint(1, 16), rng.choice([7, 50, 140])
        g = GridSpec(0, 0, nx * pixel, ny * pixel, pixel, 1, 2000)
        nets = _random_layout(rng, nx, ny, pixel, rng.randint(0, 20))
        maps = compute_rudy_maps(nets, g)
        want = rudy_oracle([(n.x0, n.y0, n.x1, n.y1, n.pins) for n in nets], 0, 0, pixel, nx, ny, 2000)
        for got, ref in zip((maps.rudy_net, maps.rudy_pin, maps.rudy_net_long, maps.rudy_net_short), want):
            np.testing.assert_allclose(got.values, np.array(ref), rtol=1e-9, atol=1e-12)


_coord = st.floats(0, 1000, allow_nan=False)


@settings(max_examples=200, deadline=None)
@given(_coord, _coord, _coord, _coord)
def test_conservation_property(a, b, c, d):
    g = GridSpec(0, 0, 1000, 1000, 37, 1, 1000)
    x0, x1 = sorted((a, c))
    y0, y1 = sorted((b, d))
    cx0, cy0, cx1, cy1 = clamp_box(x0, y0, x1, y1, g.pixel)
    if cx0 < 0 or cy0 < 0 or cx1 > g.res_x * g.pixel or cy1 > g.res_y * g.pixel:
        return  # only nets fully inside the grid conserve
    contrib, _, _ = net_contribution(NetBox(x0, y0, x1, y1), g)
    w, h = cx1 - cx0, cy1 - cy0
    assert math.isclose(contrib.sum(), w + h, rel_tol=1e-9)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(_coord, _coord, _coord, _coord), max_size=15))
def test_partition_and_nonnegative(boxes):
    g = GridSpec(0, 0, 1000, 1000, 90, 1, 1000)
    nets = [NetBox.from_pins([(a, b), (c, d)]) for a, b, c, d in boxes]
    m = compute_rudy_maps(nets, g)
    assert np.array_equal(m.rudy_net_long.values + m.rudy_net_short.values, m.rudy_net.values)
    for _, sm in m.items():
        assert (sm.values >= 0).all()


def test_snapshot_window(four_gate):
    with pytest.raises(AvailabilityError):
        rudy_for_snapshot(four_gate["global_route"])
    r = rudy_for_snapshot(four_gate["detailed_route"])
    assert r.rudy_net.values.sum() > 0
    assert r.rudy_net.grid.k == 50


def test_snapshot_grid_size(four_gate):
    # core 15200 x 11200 DBU, w_m1 = 140, pixel 7000 -> ceil -> 3 x 2
    r = rudy_for_snapshot(four_gate["final"], k=50)
    assert r.rudy_net.values.shape == (2, 3)
    r1 = rudy_for_snapshot(four_gate["final"], k=1)
    assert r1.rudy_net.values.shape == (80, 109)


def test_default_k_on_thousand_track_core():
    from edaschema.geometry import Rect
    from edaschema.raster import make_grid
    g = make_grid(Rect(0, 0, 1000 * 140, 1000 * 140), 140, 1).with_k(50)
    assert g.shape == (20, 20)
    assert compute_rudy_maps([], g).rudy_net.values.shape == (20, 20)
    assert not compute_rudy_maps([], g).rudy_net.values.any()
