"""DEF 5.8 subset: DIEAREA, ROWS, COMPONENTS, PINS, NETS and SPECIALNETS.

Coordinates stay in the file's database units. Routed wiring is decomposed
into one :class:`RouteSegment` per straight center-line piece; vias are kept
as points and never contribute wire length.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from ..errors import ParseError, ResolutionError
from ..geometry import Rect, bounding_box
from .lef import TechLibrary
from .lexer import Token, TokenStream

logger = logging.getLogger(__name__)

_SKIPPED_SECTIONS = {"PROPERTYDEFINITIONS", "VIAS", "NONDEFAULTRULES", "REGIONS", "BLOCKAGES",
                     "GROUPS", "FILLS", "SCANCHAINS", "STYLES", "SLOTS", "COMPONENTMASKSHIFT",
                     "PINPROPERTIES", "BEGINEXT"}
_QUIET_STATEMENTS = {"VERSION", "DIVIDERCHAR", "BUSBITCHARS", "NAMESCASESENSITIVE",
                     "TRACKS", "GCELLGRID", "HISTORY", "TECHNOLOGY"}
_ROUTE_KEYWORDS = {"ROUTED", "FIXED", "COVER", "NOSHIELD"}


@dataclass
class Component:
    name: str
    cell: str
    status: str = "UNPLACED"  # PLACED | FIXED | COVER | UNPLACED
    x: int | None = None
    y: int | None = None
    orient: str = "N"

    @property
    def is_placed(self) -> bool:
        return self.x is not None and self.status != "UNPLACED"


def _rotate_pin_shape(x: int, y: int, orient: str) -> tuple[int, int]:
    # Pin shapes rotate about the placement point.
    return {
        "N": (x, y), "S": (-x, -y), "W": (-y, x), "E": (y, -x),
        "FN": (-x, y), "FS": (x, -y), "FW": (-y, -x), "FE": (y, x),
    }[orient]


@dataclass
class Port:
    name: str
    net: str | None = None
    direction: str = "INPUT"
    use: str = "SIGNAL"
    layer: str | None = None
    shape: Rect | None = None  # relative to the placement point
    status: str = "UNPLACED"
    x: int | None = None
    y: int | None = None
    orient: str = "N"

    @property
    def is_placed(self) -> bool:
        return self.x is not None and self.status != "UNPLACED"

    @property
    def rect(self) -> Rect | None:
        """Absolute pin shape, if placed and shaped."""
        if not self.is_placed or self.shape is None:
            return None
        ax, ay = _rotate_pin_shape(self.shape.x0, self.shape.y0, self.orient)
        bx, by = _rotate_pin_shape(self.shape.x1, self.shape.y1, self.orient)
        return Rect.from_corners(ax, ay, bx, by).translate(self.x, self.y)

    @property
    def center(self) -> tuple[float, float] | None:
        r = self.rect
        if r is not None:
            return r.center
        if self.is_placed:
            return float(self.x), float(self.y)
        return None


@dataclass(frozen=True)
class RouteSegment:
    """Straight wire piece. ``ext0``/``ext1`` extend the two ends past the points."""

    layer: str
    x0: int
    y0: int
    x1: int
    y1: int
    width: int
    ext0: int
    ext1: int
    shape: str | None = None

    @property
    def length(self) -> int:
        return abs(self.x1 - self.x0) + abs(self.y1 - self.y0)

    @property
    def rect(self) -> Rect:
        lo = self.width // 2
        hi = self.width - lo
        if self.y0 == self.y1:
            (xa, ea), (xb, eb) = sorted([(self.x0, self.ext0), (self.x1, self.ext1)])
            return Rect(xa - ea, self.y0 - lo, xb + eb, self.y0 + hi)
        (ya, ea), (yb, eb) = sorted([(self.y0, self.ext0), (self.y1, self.ext1)])
        return Rect(self.x0 - lo, ya - ea, self.x0 + hi, yb + eb)


@dataclass(frozen=True)
class RouteVia:
    name: str
    x: int
    y: int
    layer: str  # routing layer in effect where the via is dropped


@dataclass
class Net:
    name: str
    is_special: bool = False
    use: str | None = None
    connections: list[tuple[str, str]] = field(default_factory=list)  # (instance | "PIN" | "*", pin)
    segments: list[RouteSegment] = field(default_factory=list)
    vias: list[RouteVia] = field(default_factory=list)

    @property
    def routed_length(self) -> int:
        return sum(s.length for s in self.segments)


@dataclass
class Row:
    name: str
    site: str
    x: int
    y: int
    orient: str = "N"
    num_x: int = 1
    num_y: int = 1
    step_x: int = 0
    step_y: int = 0


@dataclass
class PhysicalNetlist:
    design: str
    dbu_per_micron: int
    die_box: Rect
    core_box: Rect
    components: list[Component] = field(default_factory=list)
    ports: list[Port] = field(default_factory=list)
    nets: list[Net] = field(default_factory=list)
    rows: list[Row] = field(default_factory=list)
    skipped: int = field(default=0, compare=False)

    def to_microns(self, dbu: float) -> float:
        return dbu / self.dbu_per_micron

    def component_map(self) -> dict[str, Component]:
        return {c.name: c for c in self.components}

    def port_map(self) -> dict[str, Port]:
        return {p.name: p for p in self.ports}


def core_box_from_rows(rows: list[Row], tech: TechLibrary, fallback: Rect) -> Rect:
    boxes = []
    for row in rows:
        site = tech.sites.get(row.site)
        if site is None:
            continue
        sw, sh = site.width, site.height
        if row.orient in ("E", "W", "FE", "FW"):
            sw, sh = sh, sw
        x1 = row.x + (row.num_x - 1) * row.step_x + sw
        y1 = row.y + (row.num_y - 1) * row.step_y + sh
        boxes.append(Rect(row.x, row.y, x1, y1))
    return bounding_box(boxes) or fallback


def parse_def(text: str, tech: TechLibrary, source: str | None = None) -> PhysicalNetlist:
    """Parse DEF text against ``tech`` (cell, layer and via names must resolve)."""
    return _DefReader(text, tech, source).parse()


class _DefReader:
    def __init__(self, text: str, tech: TechLibrary, source: str | None):
        self.ts = TokenStream(text, source)
        self.tech = tech
        self.design = ""
        self.dbu: int | None = None
        self.die: Rect | None = None
        self.rows: list[Row] = []
        self.components: list[Component] = []
        self.ports: list[Port] = []
        self.nets: list[Net] = []
        self.skipped = 0
        self._layer_width = {l.name: l.min_width for l in tech.layers}

    def error(self, message: str, tok: Token | None = None) -> ParseError:
        return self.ts.error(message, tok.line if tok else None)

    def parse(self) -> PhysicalNetlist:
        ts = self.ts
        ended = False
        while not ts.at_end():
            tok = ts.peek()
            kw = tok.upper
            if kw == "END":
                ts.next()
                ts.expect("DESIGN")
                ended = True
                break
            if kw == "DESIGN":
                stmt = ts.statement()
                self.design = stmt[1].text if len(stmt) > 1 else ""
            elif kw == "UNITS":
                stmt = ts.statement()
                if len(stmt) != 4 or stmt[1].upper != "DISTANCE" or stmt[2].upper != "MICRONS":
                    raise self.error("malformed UNITS statement", tok)
                self.dbu = ts.integer(stmt[3])
                if self.dbu <= 0:
                    raise self.error("UNITS DISTANCE MICRONS must be positive", tok)
                if self.dbu != self.tech.dbu_per_micron:
                    # Cell footprints are in LEF units; mixing scales would misplace pins.
                    raise self.error(f"DEF units {self.dbu} differ from LEF units "
                                     f"{self.tech.dbu_per_micron}", tok)
            elif kw == "DIEAREA":
                stmt = ts.statement()
                pts = self._points(stmt[1:], allow_star=False)
                if len(pts) < 2:
                    raise self.error("DIEAREA needs at least two points", tok)
                xs = [p[0] for p in pts]
                ys = [p[1] for p in pts]
                self.die = Rect(min(xs), min(ys), max(xs), max(ys))
            elif kw == "ROW":
                self._row(ts.statement())
            elif kw == "COMPONENTS":
                self._section("COMPONENTS", self._component)
            elif kw == "PINS":
                self._section("PINS", self._pin)
            elif kw == "NETS":
                self._section("NETS", lambda s: self._net(s, special=False))
            elif kw == "SPECIALNETS":
                self._section("SPECIALNETS", lambda s: self._net(s, special=True))
            elif kw in _SKIPPED_SECTIONS:
                ts.next()
                if kw == "BEGINEXT":
                    while ts.next().upper != "ENDEXT":
                        pass
                else:
                    ts.skip_block(kw)
            elif kw in _QUIET_STATEMENTS:
                ts.statement()
            else:
                self.skipped += 1
                logger.warning("DEF line %s: skipping unsupported statement %s", tok.line, tok.text)
                ts.statement()
        if not ended:
            raise ParseError("missing END DESIGN", ts.line, ts.source)
        if self.dbu is None:
            raise ParseError("missing UNITS DISTANCE MICRONS", None, ts.source)
        if self.die is None:
            raise ParseError("missing DIEAREA", None, ts.source)
        core = core_box_from_rows(self.rows, self.tech, self.die)
        if not self.die.contains(core):
            raise ParseError("rows extend outside DIEAREA", None, ts.source)
        self._check_connectivity()
        return PhysicalNetlist(self.design, self.dbu, self.die, core, self.components,
                               self.ports, self.nets, self.rows, self.skipped)

    # --- helpers -------------------------------------------------------

    def _section(self, name: str, handler) -> None:
        ts = self.ts
        ts.expect(name)
        ts.statement()  # declared count; not trusted
        while True:
            tok = ts.peek()
            if tok is None:
                raise self.error(f"unterminated {name} section")
            if tok.upper == "END":
                ts.next()
                ts.expect(name)
                return
            stmt = ts.statement()
            if not stmt:
                continue
            if stmt[0].text != "-":
                raise self.error(f"expected '-' to start a {name} entry, found {stmt[0].text!r}", stmt[0])
            handler(stmt)

    def _points(self, toks: list[Token], allow_star: bool = True,
                prev: tuple[int, int] | None = None) -> list[tuple[int, int]]:
        pts = []
        i = 0
        while i < len(toks):
            if toks[i].text != "(":
                raise self.error(f"expected '(' in point list, found {toks[i].text!r}", toks[i])
            try:
                close = next(j for j in range(i, len(toks)) if toks[j].text == ")")
            except StopIteration:
                raise self.error("unclosed '(' in point list", toks[i]) from None
            inner = toks[i + 1:close]
            if len(inner) < 2:
                raise self.error("point needs x and y", toks[i])
            pts.append(self._xy(inner, prev, allow_star))
            prev = pts[-1]
            i = close + 1
        return pts

    def _xy(self, inner: list[Token], prev, allow_star: bool) -> tuple[int, int]:
        out = []
        for axis, tok in enumerate(inner[:2]):
            if tok.text == "*":
                if not allow_star or prev is None:
                    raise self.error("'*' coordinate without a previous point", tok)
                out.append(prev[axis])
            else:
                out.append(self.ts.integer(tok))
        return out[0], out[1]

    def _row(self, stmt: list[Token]) -> None:
        if len(stmt) < 6:
            raise self.error("malformed ROW statement", stmt[0])
        row = Row(stmt[1].text, stmt[2].text, self.ts.integer(stmt[3]), self.ts.integer(stmt[4]),
                  stmt[5].text)
        rest = stmt[6:]
        if len(rest) >= 4 and rest[0].upper == "DO" and rest[2].upper == "BY":
            row.num_x, row.num_y = self.ts.integer(rest[1]), self.ts.integer(rest[3])
            if len(rest) >= 7 and rest[4].upper == "STEP":
                row.step_x, row.step_y = self.ts.integer(rest[5]), self.ts.integer(rest[6])
        self.rows.append(row)

    @staticmethod
    def _options(stmt: list[Token]) -> list[list[Token]]:
        """Split the tokens after ``- name ...`` into ``+ KEYWORD ...`` groups."""
        groups: list[list[Token]] = [[]]
        for tok in stmt:
            if tok.text == "+":
                groups.append([])
            else:
                groups[-1].append(tok)
        return groups

    def _placement(self, group: list[Token], obj) -> None:
        obj.status = group[0].upper
        if obj.status == "UNPLACED":
            return
        if len(group) < 5 or group[1].text != "(" or group[4].text != ")":
            raise self.error(f"malformed {obj.status} placement", group[0])
        obj.x, obj.y = self.ts.integer(group[2]), self.ts.integer(group[3])
        if len(group) > 5:
            obj.orient = group[5].upper

    def _component(self, stmt: list[Token]) -> None:
        if len(stmt) < 3:
            raise self.error("component entry needs a name and a cell", stmt[0])
        name, cell = stmt[1].text, stmt[2].text
        if cell not in self.tech.macros:
            raise ResolutionError(f"component {name} references unknown cell {cell}",
                                  stmt[2].line, self.ts.source)
        comp = Component(name, cell)
        for group in self._options(stmt[3:])[1:]:
            if group and group[0].upper in ("PLACED", "FIXED", "COVER", "UNPLACED"):
                self._placement(group, comp)
        self.components.append(comp)

    def _pin(self, stmt: list[Token]) -> None:
        port = Port(stmt[1].text)
        for group in self._options(stmt[2:])[1:]:
            if not group:
                continue
            kw = group[0].upper
            if kw == "NET" and len(group) > 1:
                port.net = group[1].text
            elif kw == "DIRECTION" and len(group) > 1:
                port.direction = group[1].upper
            elif kw == "USE" and len(group) > 1:
                port.use = group[1].upper
            elif kw == "LAYER" and port.layer is None:
                port.layer = group[1].text
                toks = group[2:]
                while toks and toks[0].text != "(":
                    toks = toks[2:]  # MASK n / SPACING d / DESIGNRULEWIDTH d
                pts = self._points(toks, allow_star=False)
                if len(pts) != 2:
                    raise self.error("pin LAYER shape needs two points", group[0])
                port.shape = Rect.from_corners(*pts[0], *pts[1])
            elif kw in ("PLACED", "FIXED", "COVER", "UNPLACED") and port.status == "UNPLACED":
                self._placement(group, port)
        self.ports.append(port)

    def _net(self, stmt: list[Token], special: bool) -> None:
        net = Net(stmt[1].text, is_special=special)
        i = 2
        while i < len(stmt) and stmt[i].text == "(":
            close = i
            while close < len(stmt) and stmt[close].text != ")":
                close += 1
            if close >= len(stmt) or close - i < 3:
                raise self.error("malformed net connection", stmt[i])
            net.connections.append((stmt[i + 1].text, stmt[i + 2].text))
            i = close + 1
        groups = self._options(stmt[i:])
        if groups[0]:
            raise self.error(f"unexpected token {groups[0][0].text!r} in net {net.name}", groups[0][0])
        route: list[Token] | None = None
        for group in groups[1:]:
            if not group:
                continue
            kw = group[0].upper
            if kw in _ROUTE_KEYWORDS:
                route = list(group[1:])
            elif kw in ("SHAPE", "MASK", "STYLE") and route is not None:
                route.append(Token("+", group[0].line))
                route.extend(group)
            else:
                if route is not None:
                    self._route(net, route)
                    route = None
                if kw == "USE" and len(group) > 1:
                    net.use = group[1].upper
        if route is not None:
            self._route(net, route)
        self.nets.append(net)

    def _route(self, net: Net, toks: list[Token]) -> None:
        paths: list[list[Token]] = [[]]
        for tok in toks:
            if tok.upper == "NEW":
                paths.append([])
            else:
                paths[-1].append(tok)
        for path in paths:
            if path:
                self._path(net, path)

    def _path(self, net: Net, toks: list[Token]) -> None:
        layer = toks[0].text
        if layer not in self._layer_width:
            raise ResolutionError(f"net {net.name} routes on unknown layer {layer}", toks[0].line,
                                  self.ts.source)
        i = 1
        width = self._layer_width[layer] or 0
        if net.is_special:
            if i >= len(toks):
                raise self.error("special wire needs a width", toks[0])
            width = self.ts.integer(toks[i])
            i += 1
        shape = None
        prev: tuple[int, int] | None = None
        prev_ext: int | None = None
        default_ext = 0 if net.is_special else width // 2
        while i < len(toks):
            tok = toks[i]
            kw = tok.upper
            if tok.text == "+":
                sub = toks[i + 1].upper if i + 1 < len(toks) else ""
                if sub == "SHAPE":
                    shape = toks[i + 2].upper
                i += 3
            elif kw in ("MASK", "STYLE"):
                i += 2
            elif kw in ("TAPER",):
                i += 1
            elif kw == "TAPERRULE":
                i += 2
            elif kw == "VIRTUAL":
                prev = None
                i += 1
            elif kw == "RECT":
                # ( dx1 dy1 dx2 dy2 ) patch relative to the previous point
                i += 7
                self.skipped += 1
            elif tok.text == "(":
                try:
                    close = next(j for j in range(i, len(toks)) if toks[j].text == ")")
                except StopIteration:
                    raise self.error("unclosed '(' in routing points", tok) from None
                inner = toks[i + 1:close]
                if len(inner) not in (2, 3):
                    raise self.error("malformed routing point", tok)
                pt = self._xy(inner, prev, allow_star=True)
                ext = self.ts.integer(inner[2]) if len(inner) == 3 else default_ext
                if prev is not None and pt != prev:
                    if pt[0] != prev[0] and pt[1] != prev[1]:
                        raise self.error(f"non-orthogonal wire in net {net.name}", tok)
                    net.segments.append(RouteSegment(layer, prev[0], prev[1], pt[0], pt[1],
                                                     width, prev_ext, ext, shape))
                prev, prev_ext = pt, ext
                i = close + 1
            else:
                # via name placed at the previous point
                if prev is None:
                    raise self.error(f"via {tok.text} without a preceding point", tok)
                net.vias.append(RouteVia(tok.text, prev[0], prev[1], layer))
                layer = self._layer_after_via(tok.text, layer)
                width = self._layer_width.get(layer) or width
                i += 1
                while i < len(toks) and toks[i].upper in ("N", "S", "E", "W", "FN", "FS", "FE", "FW"):
                    i += 1
                if i < len(toks) and toks[i].upper == "DO":
                    i += 7  # via array: DO n BY m STEP sx sy

    def _layer_after_via(self, via: str, layer: str) -> str:
        layers = [l for l in self.tech.vias.get(via, ()) if self._is_routing(l)]
        others = [l for l in layers if l != layer]
        if others:
            return others[-1] if len(others) > 1 else others[0]
        if via not in self.tech.vias:
            self.skipped += 1
        return layer

    def _is_routing(self, name: str) -> bool:
        layer = self.tech.layer(name)
        return layer is not None and layer.is_routing

    def _check_connectivity(self) -> None:
        comps = {c.name: c for c in self.components}
        ports = {p.name for p in self.ports}
        for net in self.nets:
            for inst, pin in net.connections:
                if inst == "*":
                    continue
                if inst == "PIN":
                    if pin not in ports:
                        raise ResolutionError(f"net {net.name} connects to undeclared port {pin}",
                                              None, self.ts.source)
                    continue
                comp = comps.get(inst)
                if comp is None:
                    raise ResolutionError(f"net {net.name} connects to undeclared instance {inst}",
                                          None, self.ts.source)
                if pin not in self.tech.macros[comp.cell].pins:
                    raise ResolutionError(f"net {net.name}: cell {comp.cell} has no pin {pin}",
                                          None, self.ts.source)


def write_def(pn: PhysicalNetlist) -> str:
    """Canonical DEF text for the supported subset."""
    d = pn.die_box
    out = ["VERSION 5.8 ;", 'DIVIDERCHAR "/" ;', 'BUSBITCHARS "[]" ;', f"DESIGN {pn.design} ;",
           f"UNITS DISTANCE MICRONS {pn.dbu_per_micron} ;",
           f"DIEAREA ( {d.x0} {d.y0} ) ( {d.x1} {d.y1} ) ;"]
    for r in pn.rows:
        out.append(f"ROW {r.name} {r.site} {r.x} {r.y} {r.orient} DO {r.num_x} BY {r.num_y} "
                   f"STEP {r.step_x} {r.step_y} ;")
    out.append(f"COMPONENTS {len(pn.components)} ;")
    for c in pn.components:
        line = f"- {c.name} {c.cell}"
        if c.status != "UNPLACED":
            line += f" + {c.status} ( {c.x} {c.y} ) {c.orient}"
        elif c.x is None:
            line += " + UNPLACED"
        out.append(line + " ;")
    out.append("END COMPONENTS")
    out.append(f"PINS {len(pn.ports)} ;")
    for p in pn.ports:
        line = f"- {p.name}"
        if p.net is not None:
            line += f" + NET {p.net}"
        line += f" + DIRECTION {p.direction} + USE {p.use}"
        if p.layer is not None and p.shape is not None:
            s = p.shape
            line += f" + LAYER {p.layer} ( {s.x0} {s.y0} ) ( {s.x1} {s.y1} )"
        if p.status != "UNPLACED":
            line += f" + {p.status} ( {p.x} {p.y} ) {p.orient}"
        out.append(line + " ;")
    out.append("END PINS")
    for special in (True, False):
        nets = [n for n in pn.nets if n.is_special == special]
        section = "SPECIALNETS" if special else "NETS"
        out.append(f"{section} {len(nets)} ;")
        for n in nets:
            out.append(_net_text(n))
        out.append(f"END {section}")
    out.append("END DESIGN")
    return "\n".join(out) + "\n"


def _net_text(n: Net) -> str:
    parts = [f"- {n.name}"]
    parts += [f"( {inst} {pin} )" for inst, pin in n.connections]
    paths = []
    for s in n.segments:
        default = 0 if n.is_special else s.width // 2
        head = f"{s.layer} {s.width}" if n.is_special else s.layer
        if s.shape:
            head += f" + SHAPE {s.shape}"
        e0 = f" {s.ext0}" if s.ext0 != default else ""
        e1 = f" {s.ext1}" if s.ext1 != default else ""
        paths.append(f"{head} ( {s.x0} {s.y0}{e0} ) ( {s.x1} {s.y1}{e1} )")
    for v in n.vias:
        width = " 0" if n.is_special else ""
        paths.append(f"{v.layer}{width} ( {v.x} {v.y} ) {v.name}")
    text = "\n  ".join(parts)
    if paths:
        text += "\n  + ROUTED " + "\n    NEW ".join(paths)
    if n.use:
        text += f"\n  + USE {n.use}"
    return text + " ;"
