"""Tile grids sized from the metal-1 minimum width, binary occupancy maps, scalar maps.

Arrays are indexed ``[row, col]`` with row 0 at the bottom (lowest y) of the
grid, which is anchored at the core lower-left corner.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import UndefinedError
from .geometry import Rect

BINARY_K = 1
SCALAR_K = 50


@dataclass(frozen=True)
class GridSpec:
    origin_x: int
    origin_y: int
    length: int  # L, DBU along x
    width: int  # W, DBU along y
    w_m1: int
    k: int = BINARY_K
    dbu_per_micron: int = 1000

    def __post_init__(self):
        if self.w_m1 <= 0:
            raise ValueError("w_m1 must be positive")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.length <= 0 or self.width <= 0:
            raise ValueError("degenerate core box")

    @property
    def pixel(self) -> int:
        return self.k * self.w_m1

    @property
    def res_x(self) -> int:
        return -(-self.length // self.pixel)

    @property
    def res_y(self) -> int:
        return -(-self.width // self.pixel)

    @property
    def shape(self) -> tuple[int, int]:
        return self.res_y, self.res_x

    @property
    def extent(self) -> Rect:
        return Rect(self.origin_x, self.origin_y, self.origin_x + self.res_x * self.pixel,
                    self.origin_y + self.res_y * self.pixel)

    def tile(self, row: int, col: int) -> Rect:
        p = self.pixel
        x0 = self.origin_x + col * p
        y0 = self.origin_y + row * p
        return Rect(x0, y0, x0 + p, y0 + p)

    def with_k(self, k: int) -> "GridSpec":
        return GridSpec(self.origin_x, self.origin_y, self.length, self.width, self.w_m1, k,
                        self.dbu_per_micron)

    def to_dict(self) -> dict:
        return {"origin_x": self.origin_x, "origin_y": self.origin_y, "length": self.length,
                "width": self.width, "w_m1": self.w_m1, "k": self.k,
                "dbu_per_micron": self.dbu_per_micron, "anchor": "core"}

    @classmethod
    def from_dict(cls, d: dict) -> "GridSpec":
        return cls(d["origin_x"], d["origin_y"], d["length"], d["width"], d["w_m1"], d["k"],
                   d["dbu_per_micron"])


def make_grid(core_box: Rect, w_m1: int, k: int = BINARY_K, dbu_per_micron: int = 1000) -> GridSpec:
    """Grid over ``core_box`` with pixel side ``k * w_m1`` and ceiling resolution."""
    if core_box.width <= 0 or core_box.height <= 0:
        raise ValueError(f"degenerate core box {core_box}")
    return GridSpec(core_box.x0, core_box.y0, core_box.width, core_box.height, w_m1, k,
                    dbu_per_micron)


@dataclass(eq=False)
class SpatialMap:
    name: str
    grid: GridSpec
    bits: np.ndarray  # bool, shape grid.shape

    def __post_init__(self):
        if self.bits.shape != self.grid.shape:
            raise ValueError(f"map {self.name}: shape {self.bits.shape} != grid {self.grid.shape}")

    def __eq__(self, other):
        return (isinstance(other, SpatialMap) and self.name == other.name
                and self.grid == other.grid and np.array_equal(self.bits, other.bits))

    def __or__(self, other: "SpatialMap") -> "SpatialMap":
        return SpatialMap(self.name, self.grid, self.bits | other.bits)

    @property
    def count(self) -> int:
        return int(self.bits.sum())


@dataclass(eq=False)
class ScalarMap:
    name: str
    grid: GridSpec
    values: np.ndarray  # float64, shape grid.shape
    unit: str | None = None
    mask: np.ndarray | None = field(default=None)  # True where the tile was sampled

    def __post_init__(self):
        if self.values.shape != self.grid.shape:
            raise ValueError(f"map {self.name}: shape {self.values.shape} != grid {self.grid.shape}")
        if not np.all(np.isfinite(self.values)):
            raise ValueError(f"map {self.name} has non-finite values")

    def __eq__(self, other):
        if not isinstance(other, ScalarMap):
            return False
        masks_equal = (self.mask is None and other.mask is None) or (
            self.mask is not None and other.mask is not None
            and np.array_equal(self.mask, other.mask))
        return (self.name == other.name and self.grid == other.grid and self.unit == other.unit
                and masks_equal and np.array_equal(self.values, other.values))


def tile_span(lo, hi, origin: int, pixel: int, n: int) -> tuple[int, int]:
    """Half-open index range of tiles overlapping (lo, hi) with positive length."""
    a = max(0, math.floor((lo - origin) / pixel))
    b = min(n, math.ceil((hi - origin) / pixel))
    return a, b


def rasterize_rects(rects: Iterable[Rect], grid: GridSpec, name: str = "") -> SpatialMap:
    """Set every pixel that any rectangle overlaps with positive area."""
    ny, nx_ = grid.shape
    arr = np.asarray([(r.x0, r.y0, r.x1, r.y1) for r in rects], dtype=np.int64).reshape(-1, 4)
    if len(arr) == 0:
        return SpatialMap(name, grid, np.zeros(grid.shape, dtype=bool))
    p = grid.pixel
    x0 = arr[:, 0] - grid.origin_x
    y0 = arr[:, 1] - grid.origin_y
    x1 = arr[:, 2] - grid.origin_x
    y1 = arr[:, 3] - grid.origin_y
    c0 = np.clip(np.floor_divide(x0, p), 0, nx_)
    c1 = np.clip(-np.floor_divide(-x1, p), 0, nx_)
    r0 = np.clip(np.floor_divide(y0, p), 0, ny)
    r1 = np.clip(-np.floor_divide(-y1, p), 0, ny)
    keep = (c1 > c0) & (r1 > r0) & (x1 > x0) & (y1 > y0)
    c0, c1, r0, r1 = c0[keep], c1[keep], r0[keep], r1[keep]
    diff = np.zeros((ny + 1, nx_ + 1), dtype=np.int64)
    np.add.at(diff, (r0, c0), 1)
    np.add.at(diff, (r0, c1), -1)
    np.add.at(diff, (r1, c0), -1)
    np.add.at(diff, (r1, c1), 1)
    cover = diff.cumsum(axis=0).cumsum(axis=1)[:ny, :nx_]
    return SpatialMap(name, grid, cover > 0)


def point_tiles(xs: np.ndarray, ys: np.ndarray, grid: GridSpec) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(rows, cols, inside) for DBU points; lower-left inclusive, far edge in the last tile."""
    p = grid.pixel
    ny, nx_ = grid.shape
    fx = (np.asarray(xs, dtype=np.float64) - grid.origin_x) / p
    fy = (np.asarray(ys, dtype=np.float64) - grid.origin_y) / p
    cols = np.floor(fx).astype(np.int64)
    rows = np.floor(fy).astype(np.int64)
    ext = grid.extent
    cols = np.where((cols == nx_) & (np.asarray(xs) == ext.x1), nx_ - 1, cols)
    rows = np.where((rows == ny) & (np.asarray(ys) == ext.y1), ny - 1, rows)
    inside = (cols >= 0) & (cols < nx_) & (rows >= 0) & (rows < ny)
    return rows, cols, inside


def rasterize_points(points: Iterable[tuple[float, float]], grid: GridSpec, name: str = "") -> SpatialMap:
    pts = np.asarray(list(points), dtype=np.float64).reshape(-1, 2)
    bits = np.zeros(grid.shape, dtype=bool)
    if len(pts):
        rows, cols, inside = point_tiles(pts[:, 0], pts[:, 1], grid)
        bits[rows[inside], cols[inside]] = True
    return SpatialMap(name, grid, bits)


def grid_samples_to_scalar_map(samples, grid: GridSpec, aggregator: str = "mean",
                               name: str = "", unit: str | None = None) -> ScalarMap:
    """Bin micron-coordinate samples into tiles; empty tiles are 0 and masked out."""
    if aggregator not in ("mean", "max"):
        raise ValueError(f"unknown aggregator {aggregator!r}")
    xs, ys, vals = samples.arrays()
    unit = unit if unit is not None else samples.value_unit
    values = np.zeros(grid.shape, dtype=np.float64)
    mask = np.zeros(grid.shape, dtype=bool)
    if len(vals) == 0:
        return ScalarMap(name, grid, values, unit, mask)
    d = grid.dbu_per_micron
    rows, cols, inside = point_tiles(xs * d, ys * d, grid)
    if not inside.any():
        raise UndefinedError("all samples fall outside the grid")
    rows, cols, vals = rows[inside], cols[inside], vals[inside]
    counts = np.zeros(grid.shape, dtype=np.int64)
    np.add.at(counts, (rows, cols), 1)
    mask = counts > 0
    if aggregator == "mean":
        np.add.at(values, (rows, cols), vals)
        values[mask] /= counts[mask]
    else:
        acc = np.full(grid.shape, -np.inf)
        np.maximum.at(acc, (rows, cols), vals)
        values[mask] = acc[mask]
    return ScalarMap(name, grid, values, unit, mask)


# --- snapshot renderers --------------------------------------------------

NETLIST_MAPS = ("cell_placement", "cell_placement_combinational", "cell_placement_sequential",
                "cell_placement_filler", "pin_placement", "routing", "routing_by_metal_layers")
CLOCK_MAPS = ("cell_placement", "cell_placement_combinational", "cell_placement_sequential",
              "pin_placement", "routing", "routing_by_metal_layers")
PDN_MAPS = ("pdn_routing_vdd", "pdn_routing_vss", "voltage_source")
_LOGIC = ("combinational", "buffer", "inverter")


def map_entity_attr(key: str) -> tuple[str, str]:
    entity, attr = key.split("/")[:2]
    return entity, attr


def _select(entity: str, names: tuple[str, ...], stage: str, which) -> list[str]:
    from .stages import is_available, require_available

    if which is None:
        return [n for n in names if is_available(entity, n, stage)]
    out = []
    for n in which:
        if n not in names:
            raise KeyError(f"unknown {entity} map {n!r}")
        require_available(entity, n, stage)
        out.append(n)
    return out


def binary_grid(s) -> GridSpec:
    return make_grid(s.core_box, s.w_m1, BINARY_K, s.dbu_per_micron)


def _routing(entity: str, wires, layers, grid, wanted) -> dict[str, SpatialMap]:
    out = {}
    if "routing" in wanted:
        out[f"{entity}/routing"] = rasterize_rects((w.rect for w in wires), grid, f"{entity}/routing")
    if "routing_by_metal_layers" in wanted:
        for layer in layers:
            key = f"{entity}/routing_by_metal_layers/{layer}"
            out[key] = rasterize_rects((w.rect for w in wires if w.layer == layer), grid, key)
    return out


def render_netlist_maps(s, which=None) -> dict[str, SpatialMap]:
    """Binary netlist maps for snapshot ``s``; ``which`` names must be inside their window."""
    wanted = _select("netlist", NETLIST_MAPS, s.stage, which)
    grid = binary_grid(s)
    g = s.netlist
    boxes = {
        "cell_placement": [x.box for x in g.gates.values() if x.category != "filler"],
        "cell_placement_combinational": [x.box for x in g.gates.values() if x.category in _LOGIC],
        "cell_placement_sequential": [x.box for x in g.gates.values() if x.category == "sequential"],
        "cell_placement_filler": [x.box for x in g.gates.values() if x.category == "filler"],
    }
    out: dict[str, SpatialMap] = {}
    for name in wanted:
        key = f"netlist/{name}"
        if name in boxes:
            out[key] = rasterize_rects([b for b in boxes[name] if b is not None], grid, key)
        elif name == "pin_placement":
            m = rasterize_rects([p.box for p in g.pins.values() if p.box is not None], grid, key)
            ports = rasterize_points([(p.x, p.y) for p in g.ports.values() if p.x is not None], grid, key)
            out[key] = m | ports
    signal = [w for w in g.wires if not g.nets[w.net].is_special_net]
    out.update(_routing("netlist", signal, s.routing_layers, grid, wanted))
    return out


def render_clock_maps(s, which=None) -> dict[str, SpatialMap]:
    wanted = _select("clock_tree", CLOCK_MAPS, s.stage, which)
    cng = s.clock_tree
    if cng is None:
        from .errors import AvailabilityError
        raise AvailabilityError(f"no clock network at {s.stage}")
    grid = binary_grid(s)
    g = s.netlist
    sinks = set(cng.sink_gates())
    boxes = {
        "cell_placement": [g.gates[n].box for n in cng.gates],
        "cell_placement_combinational": [g.gates[n].box for n in cng.buffers],
        "cell_placement_sequential": [g.gates[n].box for n in cng.gates if n in sinks],
        "pin_placement": [g.pins[p].box for p in cng.pins],
    }
    out = {}
    for name in wanted:
        if name in boxes:
            key = f"clock_tree/{name}"
            out[key] = rasterize_rects([b for b in boxes[name] if b is not None], grid, key)
    nets = set(cng.nets)
    out.update(_routing("clock_tree", [w for w in g.wires if w.net in nets], s.routing_layers,
                        grid, wanted))
    return out


def render_pdn_maps(s, which=None) -> dict[str, SpatialMap]:
    wanted = _select("pdn", PDN_MAPS, s.stage, which)
    pdn = s.pdn
    if pdn is None or not (pdn.vdd_nets or pdn.vss_nets):
        from .errors import AvailabilityError
        raise AvailabilityError("no power/ground special nets in this snapshot")
    grid = binary_grid(s)
    wires = s.netlist.wires
    out = {}
    for name in wanted:
        key = f"pdn/{name}"
        if name == "pdn_routing_vdd":
            out[key] = rasterize_rects([w.rect for w in wires if w.net in pdn.vdd_nets], grid, key)
        elif name == "pdn_routing_vss":
            out[key] = rasterize_rects([w.rect for w in wires if w.net in pdn.vss_nets], grid, key)
        else:
            out[key] = rasterize_points(pdn.voltage_sources, grid, key)
    return out
