"""RUDY routing-demand maps: net, pin, and the long/short net split.

A net spreads the density ``(w + h) / (w * h)`` uniformly over its bounding
box; a tile receives density times the overlap area. Bounding boxes narrower
than one tile are widened about their center to one tile side so the density
stays finite. Internally everything is DBU; maps are reported in microns
(net maps) and 1/micron (pin map).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .raster import SCALAR_K, GridSpec, ScalarMap, make_grid, point_tiles, tile_span

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NetBox:
    x0: float
    y0: float
    x1: float
    y1: float
    pins: tuple[tuple[float, float], ...] = field(default=())

    @classmethod
    def from_pins(cls, pins) -> "NetBox":
        pins = tuple((float(x), float(y)) for x, y in pins)
        xs = [p[0] for p in pins]
        ys = [p[1] for p in pins]
        return cls(min(xs), min(ys), max(xs), max(ys), pins)


@dataclass
class RudyMaps:
    rudy_net: ScalarMap
    rudy_pin: ScalarMap
    rudy_net_long: ScalarMap
    rudy_net_short: ScalarMap

    def items(self):
        return (("rudy_net", self.rudy_net), ("rudy_pin", self.rudy_pin),
                ("rudy_net_long", self.rudy_net_long), ("rudy_net_short", self.rudy_net_short))


def net_density(w: float, h: float) -> float:
    """``(w + h) / (w * h)`` for an already clamped box."""
    return (w + h) / (w * h)


def clamp_box(x0: float, y0: float, x1: float, y1: float, side: float
              ) -> tuple[float, float, float, float]:
    """Widen each axis to at least ``side``, keeping the center."""
    if x1 - x0 < side:
        cx = (x0 + x1) / 2
        x0, x1 = cx - side / 2, cx + side / 2
    if y1 - y0 < side:
        cy = (y0 + y1) / 2
        y0, y1 = cy - side / 2, cy + side / 2
    return x0, y0, x1, y1


def _overlaps(lo: float, hi: float, origin: int, pixel: int, n: int) -> tuple[int, np.ndarray]:
    a, b = tile_span(lo, hi, origin, pixel, n)
    if b <= a:
        return a, np.zeros(0)
    edges = origin + pixel * np.arange(a, b + 1, dtype=np.float64)
    lengths = np.minimum(hi, edges[1:]) - np.maximum(lo, edges[:-1])
    return a, np.clip(lengths, 0.0, None)


def _span_count(lo: float, hi: float, origin: int, pixel: int, n: int) -> int:
    """Tiles an axis interval overlaps with positive length; a point counts its own tile."""
    if hi > lo:
        a, b = tile_span(lo, hi, origin, pixel, n)
        return max(0, b - a)
    i = math.floor((lo - origin) / pixel)
    if i == n and lo == origin + n * pixel:
        i = n - 1
    return 1 if 0 <= i < n else 0


def classify_net_span(box: tuple[float, float, float, float], grid: GridSpec) -> str:
    """``long`` iff the raw (unwidened) box overlaps two or more tiles."""
    x0, y0, x1, y1 = box
    tiles = _span_count(x0, x1, grid.origin_x, grid.pixel, grid.res_x) * \
        _span_count(y0, y1, grid.origin_y, grid.pixel, grid.res_y)
    if tiles == 0:
        logger.warning("net box %s lies outside the grid", box)
    return "long" if tiles >= 2 else "short"


def net_contribution(box: NetBox, grid: GridSpec) -> tuple[np.ndarray, bool, float]:
    """Per-tile DBU contribution of one net, whether it is long, and its density (1/DBU).

    The span test uses the raw box; only the density spread uses the widened one,
    so a net confined to one tile stays short even if widening crosses a tile edge.
    """
    x0, y0, x1, y1 = clamp_box(box.x0, box.y0, box.x1, box.y1, grid.pixel)
    dens = net_density(x1 - x0, y1 - y0)
    out = np.zeros(grid.shape)
    c0, lx = _overlaps(x0, x1, grid.origin_x, grid.pixel, grid.res_x)
    r0, ly = _overlaps(y0, y1, grid.origin_y, grid.pixel, grid.res_y)
    if len(lx) and len(ly):
        out[r0:r0 + len(ly), c0:c0 + len(lx)] = dens * np.outer(ly, lx)
    tiles = _span_count(box.x0, box.x1, grid.origin_x, grid.pixel, grid.res_x) * \
        _span_count(box.y0, box.y1, grid.origin_y, grid.pixel, grid.res_y)
    return out, tiles >= 2, dens


def compute_rudy_maps(nets: list[NetBox], grid: GridSpec) -> RudyMaps:
    long_ = np.zeros(grid.shape)
    short = np.zeros(grid.shape)
    pin = np.zeros(grid.shape)
    d = grid.dbu_per_micron
    outside = 0
    for box in nets:
        contrib, is_long, dens = net_contribution(box, grid)
        if not contrib.any():
            outside += 1
        if is_long:
            long_ += contrib
        else:
            short += contrib
        if box.pins:
            pts = np.asarray(box.pins, dtype=np.float64)
            rows, cols, inside = point_tiles(pts[:, 0], pts[:, 1], grid)
            np.add.at(pin, (rows[inside], cols[inside]), dens)
    if outside:
        logger.warning("%d nets contribute nothing (outside the grid)", outside)
    long_um = long_ / d
    short_um = short / d
    return RudyMaps(
        rudy_net=ScalarMap("routability_metrics/rudy_net", grid, long_um + short_um, "um"),
        rudy_pin=ScalarMap("routability_metrics/rudy_pin", grid, pin * d, "1/um"),
        rudy_net_long=ScalarMap("routability_metrics/rudy_net_long", grid, long_um, "um"),
        rudy_net_short=ScalarMap("routability_metrics/rudy_net_short", grid, short_um, "um"),
    )


def snapshot_net_boxes(s) -> list[NetBox]:
    """Signal nets with at least one placed pin, boxed by pin/port centers."""
    out = []
    g = s.netlist
    for name, (pins, ports) in g.members_by_net().items():
        if g.nets[name].is_special_net:
            continue
        pts = [p.center for p in pins if p.center is not None]
        pts += [(p.x, p.y) for p in ports if p.x is not None]
        if pts:
            out.append(NetBox.from_pins(pts))
    return out


def rudy_for_snapshot(s, k: int = SCALAR_K) -> RudyMaps:
    from .stages import require_available

    for attr in ("rudy_net", "rudy_pin", "rudy_net_long", "rudy_net_short"):
        require_available("routability_metrics", attr, s.stage)
    grid = make_grid(s.core_box, s.w_m1, k, s.dbu_per_micron)
    return compute_rudy_maps(snapshot_net_boxes(s), grid)
