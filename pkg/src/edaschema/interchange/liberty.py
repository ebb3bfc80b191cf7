"""Liberty subset reader producing a per-cell catalog.

The grammar is the generic group/attribute form::

    name ( args ) { ... }      group
    name : value ;             simple attribute
    name ( args ) ;            complex attribute

Only ``library``, ``cell``, ``pin``, ``ff``/``latch`` and ``leakage_power``
groups are interpreted; everything else is parsed and ignored.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from ..errors import ParseError

_TOKEN = re.compile(r'"(?:[^"\\]|\\.)*"|[{}():;,]|[^\s{}():;,"]+')
_CAP_TO_FF = {"ff": 1.0, "pf": 1e3, "nf": 1e6, "f": 1e15}
_POWER_TO_UW = {"w": 1e6, "mw": 1e3, "uw": 1.0, "nw": 1e-3, "pw": 1e-6, "fw": 1e-9}
_DRIVE = re.compile(r"_X?(\d+)$", re.IGNORECASE)


@dataclass
class Group:
    name: str
    args: list[str]
    attrs: dict[str, str | list[str]] = field(default_factory=dict)
    groups: list["Group"] = field(default_factory=list)
    line: int = 0

    def find(self, name: str) -> list["Group"]:
        return [g for g in self.groups if g.name == name]


def parse_liberty_groups(text: str, source: str | None = None) -> Group:
    """Generic parse into the top-level group (normally ``library``)."""
    toks: list[tuple[str, int]] = []
    text = re.sub(r"/\*.*?\*/", lambda m: "\n" * m.group(0).count("\n"), text, flags=re.S)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        raw = raw.rstrip()
        if raw.endswith("\\"):
            raw = raw[:-1]
        toks.extend((m.group(0), lineno) for m in _TOKEN.finditer(raw))
    pos = 0

    def err(msg: str) -> ParseError:
        line = toks[pos][1] if pos < len(toks) else (toks[-1][1] if toks else None)
        return ParseError(msg, line, source)

    def take() -> str:
        nonlocal pos
        if pos >= len(toks):
            raise err("unexpected end of input (unbalanced braces?)")
        pos += 1
        return toks[pos - 1][0]

    def peek() -> str | None:
        return toks[pos][0] if pos < len(toks) else None

    def args() -> list[str]:
        out, cur = [], []
        while True:
            t = take()
            if t == ")":
                if cur:
                    out.append(" ".join(cur))
                return out
            if t == ",":
                out.append(" ".join(cur))
                cur = []
            elif t in "{};":
                raise err(f"unexpected {t!r} inside parentheses")
            else:
                cur.append(_unquote(t))

    def body(group: Group) -> None:
        while True:
            t = peek()
            if t is None:
                raise err(f"group {group.name} is missing its closing brace")
            if t == "}":
                take()
                return
            if t == ";":
                take()
                continue
            line = toks[pos][1]
            name = take()
            nxt = take()
            if nxt == ":":
                vals = []
                while peek() not in (";", "}", None) and toks[pos][1] == line:
                    vals.append(_unquote(take()))
                if peek() == ";":
                    take()
                group.attrs[name] = " ".join(vals)
            elif nxt == "(":
                a = args()
                if peek() == "{":
                    take()
                    child = Group(name, a, line=line)
                    body(child)
                    group.groups.append(child)
                else:
                    if peek() == ";":
                        take()
                    group.attrs[name] = a
            else:
                raise err(f"expected ':' or '(' after {name!r}, found {nxt!r}")

    if not toks:
        raise ParseError("empty Liberty document", None, source)
    root = Group("", [])
    while pos < len(toks):
        line = toks[pos][1]
        name = take()
        if take() != "(":
            raise err(f"expected '(' after {name!r}")
        a = args()
        if take() != "{":
            raise err(f"expected '{{' to open group {name}")
        g = Group(name, a, line=line)
        body(g)
        root.groups.append(g)
    if len(root.groups) != 1:
        raise ParseError("expected exactly one top-level group", None, source)
    return root.groups[0]


def _unquote(t: str) -> str:
    return t[1:-1] if len(t) >= 2 and t[0] == t[-1] == '"' else t


@dataclass
class CellPin:
    name: str
    direction: str  # input | output | inout | internal
    capacitance: float | None = None  # fF
    function: str | None = None
    is_clock: bool = False


@dataclass
class Cell:
    name: str
    area: float  # um^2 as characterized
    pins: dict[str, CellPin] = field(default_factory=dict)
    function: str | None = None
    width: float | None = None  # um, from LEF
    height: float | None = None
    drive_strength: int | None = None
    leakage_power_min: float | None = None  # uW
    leakage_power_max: float | None = None
    is_sequential: bool = False
    is_inverter: bool = False
    is_buffer: bool = False
    is_filler: bool = False
    is_tap: bool = False
    is_diode: bool = False
    is_macro: bool = False

    @property
    def inputs(self) -> list[CellPin]:
        return [p for p in self.pins.values() if p.direction == "input"]

    @property
    def outputs(self) -> list[CellPin]:
        return [p for p in self.pins.values() if p.direction == "output"]

    def _caps(self, pins: list[CellPin]) -> list[float]:
        return [p.capacitance for p in pins if p.capacitance is not None]

    @property
    def input_capacitance_min(self) -> float | None:
        caps = self._caps(self.inputs)
        return min(caps) if caps else None

    @property
    def input_capacitance_max(self) -> float | None:
        caps = self._caps(self.inputs)
        return max(caps) if caps else None

    @property
    def output_capacitance_min(self) -> float | None:
        caps = self._caps(self.outputs)
        return min(caps) if caps else None

    @property
    def output_capacitance_max(self) -> float | None:
        caps = self._caps(self.outputs)
        return max(caps) if caps else None

    @property
    def category(self) -> str:
        """Single exclusive bucket, filler > tap > diode > macro > sequential > buffer > inverter."""
        for flag, name in ((self.is_filler, "filler"), (self.is_tap, "tap"),
                           (self.is_diode, "diode"), (self.is_macro, "macro"),
                           (self.is_sequential, "sequential"), (self.is_buffer, "buffer"),
                           (self.is_inverter, "inverter")):
            if flag:
                return name
        return "combinational"


@dataclass
class CellCatalog:
    name: str = ""
    cells: dict[str, Cell] = field(default_factory=dict)

    def __getitem__(self, name: str) -> Cell:
        return self.cells[name]

    def __contains__(self, name: str) -> bool:
        return name in self.cells

    def __len__(self) -> int:
        return len(self.cells)

    def merge(self, other: "CellCatalog") -> "CellCatalog":
        return CellCatalog(self.name or other.name, {**self.cells, **other.cells})


def _unit_scale(spec: str | list[str] | None, table: dict[str, float], default: float) -> float:
    if spec is None:
        return default
    if isinstance(spec, list):  # capacitive_load_unit (1, ff)
        if len(spec) != 2:
            return default
        num, unit = spec
    else:
        m = re.match(r"\s*([0-9.eE+-]+)\s*([A-Za-z]+)\s*$", spec)
        if not m:
            return default
        num, unit = m.groups()
    factor = table.get(unit.lower())
    return float(num) * factor if factor is not None else default


def _norm_function(f: str) -> str:
    return re.sub(r"[\s()]", "", f)


def _classify(cell: Cell, group: Group) -> None:
    upper = cell.name.upper()
    cell.is_sequential = bool(group.find("ff") or group.find("latch") or group.find("ff_bank")
                              or group.find("latch_bank") or group.find("statetable"))
    cell.is_filler = ("FILL" in upper or group.attrs.get("is_filler_cell") == "true"
                      or (not cell.pins and "DECAP" not in upper and "TAP" not in upper))
    if not cell.is_filler:
        cell.is_tap = "TAP" in upper or group.attrs.get("is_tap_cell") == "true"
        cell.is_diode = not cell.is_tap and ("ANTENNA" in upper or "DIODE" in upper)
    if cell.is_filler or cell.is_tap or cell.is_diode or cell.is_sequential:
        return
    ins, outs = cell.inputs, cell.outputs
    if len(ins) == 1 and len(outs) == 1 and outs[0].function:
        f = _norm_function(outs[0].function)
        a = ins[0].name
        if f in (f"!{a}", f"{a}'"):
            cell.is_inverter = True
        elif f == a:
            cell.is_buffer = True


def parse_liberty(text: str, source: str | None = None) -> CellCatalog:
    lib = parse_liberty_groups(text, source)
    if lib.name != "library":
        raise ParseError(f"top-level group is {lib.name!r}, expected 'library'", lib.line, source)
    cap = _unit_scale(lib.attrs.get("capacitive_load_unit"), _CAP_TO_FF, 1e3)  # Liberty default pF
    leak = _unit_scale(lib.attrs.get("leakage_power_unit"), _POWER_TO_UW, 1.0)
    catalog = CellCatalog(lib.args[0] if lib.args else "")
    for g in lib.find("cell"):
        if not g.args:
            raise ParseError("cell group without a name", g.line, source)
        name = g.args[0]
        if "area" not in g.attrs:
            raise ParseError(f"cell {name} has no area attribute", g.line, source)
        cell = Cell(name, float(g.attrs["area"]))
        for pg in g.find("pin"):
            direction = str(pg.attrs.get("direction", "input")).lower()
            c = pg.attrs.get("capacitance")
            for pin_name in pg.args:
                cell.pins[pin_name] = CellPin(
                    pin_name, direction, float(c) * cap if c is not None else None,
                    pg.attrs.get("function"), pg.attrs.get("clock") == "true")
        outs = [p for p in cell.pins.values() if p.direction == "output" and p.function]
        cell.function = outs[0].function if len(outs) == 1 else None
        leaks = [float(lp.attrs["value"]) * leak for lp in g.find("leakage_power")
                 if "value" in lp.attrs]
        if "cell_leakage_power" in g.attrs:
            leaks.append(float(g.attrs["cell_leakage_power"]) * leak)
        if leaks:
            cell.leakage_power_min, cell.leakage_power_max = min(leaks), max(leaks)
        m = _DRIVE.search(name)
        cell.drive_strength = int(m.group(1)) if m else None
        _classify(cell, g)
        catalog.cells[name] = cell
    return catalog


def attach_geometry(catalog: CellCatalog, tech) -> CellCatalog:
    """Copy width/height (um) and the block flag from LEF macros onto catalog cells.

    Macros with no Liberty entry (fillers, taps, blocks are often missing) are added
    with area taken from the LEF footprint.
    """
    for name, macro in tech.macros.items():
        w = tech.to_microns(macro.width)
        h = tech.to_microns(macro.height)
        cell = catalog.cells.get(name)
        if cell is None:
            cell = Cell(name, w * h)
            for pin in macro.pins.values():
                cell.pins[pin.name] = CellPin(pin.name, pin.direction.lower())
            upper = name.upper()
            cell.is_filler = "FILL" in upper
            cell.is_tap = not cell.is_filler and "TAP" in upper
            cell.is_diode = not (cell.is_filler or cell.is_tap) and ("ANTENNA" in upper or "DIODE" in upper)
            catalog.cells[name] = cell
        cell.width, cell.height = w, h
        cell.is_macro = macro.is_block
    return catalog


def check_catalog(catalog: CellCatalog) -> list[str]:
    """Invariant breaches: conflicting flags or non-positive geometry."""
    problems = []
    for cell in catalog.cells.values():
        flags = sum([cell.is_inverter, cell.is_buffer, cell.is_filler, cell.is_diode])
        if flags > 1:
            problems.append(f"{cell.name}: more than one of inverter/buffer/filler/diode set")
        if cell.width is not None and (cell.width <= 0 or cell.height <= 0):
            problems.append(f"{cell.name}: non-positive geometry")
    return problems
