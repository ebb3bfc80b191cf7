"""LEF 5.x subset: UNITS, SITE, LAYER and MACRO/PIN geometry.

Everything is converted to integer database units using the ``DATABASE
MICRONS`` factor. Cell LEFs usually omit ``UNITS``; pass the technology LEF
result as ``base`` so the cell macros are merged into it.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from ..errors import ParseError
from ..geometry import Rect
from .lexer import Token, TokenStream, fmt_um, to_dbu

logger = logging.getLogger(__name__)

_SKIPPED_BLOCKS = {"VIARULE", "NONDEFAULTRULE"}
_HEADER_STATEMENTS = {"VERSION", "NAMESCASESENSITIVE", "BUSBITCHARS", "DIVIDERCHAR",
                      "MANUFACTURINGGRID"}


@dataclass
class Layer:
    name: str
    type: str
    direction: str | None = None
    min_width: int | None = None  # DBU

    @property
    def is_routing(self) -> bool:
        return self.type == "ROUTING"


@dataclass
class MacroPin:
    name: str
    direction: str = "INPUT"
    use: str = "SIGNAL"
    rects: list[tuple[str, Rect]] = field(default_factory=list)

    @property
    def bbox(self) -> Rect | None:
        box = None
        for _, r in self.rects:
            box = r if box is None else box.union(r)
        return box


@dataclass
class Macro:
    name: str
    cls: str = "CORE"
    width: int = 0  # DBU
    height: int = 0
    site: str | None = None
    pins: dict[str, MacroPin] = field(default_factory=dict)

    @property
    def is_block(self) -> bool:
        return self.cls.split()[0] in ("BLOCK", "RING", "PAD")


@dataclass
class Site:
    name: str
    cls: str = "CORE"
    width: int = 0
    height: int = 0


@dataclass
class TechLibrary:
    dbu_per_micron: int
    layers: list[Layer] = field(default_factory=list)
    macros: dict[str, Macro] = field(default_factory=dict)
    sites: dict[str, Site] = field(default_factory=dict)
    vias: dict[str, tuple[str, ...]] = field(default_factory=dict)  # via name -> layers
    skipped: int = field(default=0, compare=False)

    @property
    def routing_layers(self) -> list[Layer]:
        return [layer for layer in self.layers if layer.is_routing]

    @property
    def w_m1(self) -> int:
        """Minimum width of the first routing layer, in DBU."""
        routing = self.routing_layers
        if not routing:
            raise ValueError("technology has no ROUTING layer")
        return routing[0].min_width

    def layer(self, name: str) -> Layer | None:
        for layer in self.layers:
            if layer.name == name:
                return layer
        return None

    def to_microns(self, dbu: int) -> float:
        return dbu / self.dbu_per_micron


def parse_lef(text: str, base: TechLibrary | None = None, source: str | None = None) -> TechLibrary:
    """Parse LEF text. With ``base``, layers/macros are added to a copy of it."""
    return _LefReader(text, base, source).parse()


class _LefReader:
    def __init__(self, text: str, base: TechLibrary | None, source: str | None):
        self.ts = TokenStream(text, source)
        self.dbu: int | None = base.dbu_per_micron if base else None
        self.layers = list(base.layers) if base else []
        self.macros = dict(base.macros) if base else {}
        self.sites = dict(base.sites) if base else {}
        self.vias = dict(base.vias) if base else {}
        self.skipped = base.skipped if base else 0

    def _need_dbu(self, line: int) -> int:
        if self.dbu is None:
            raise self.ts.error("geometry before UNITS (missing DATABASE MICRONS)", line)
        return self.dbu

    def parse(self) -> TechLibrary:
        ts = self.ts
        while not ts.at_end():
            tok = ts.peek()
            kw = tok.upper
            if kw == "END":
                ts.next()
                nxt = ts.peek()
                if nxt is not None and nxt.upper == "LIBRARY":
                    ts.next()
                    break
                raise ts.error(f"unexpected END {nxt.text if nxt else ''}", tok.line)
            if kw == "UNITS":
                self._units()
            elif kw == "LAYER":
                self._layer()
            elif kw == "MACRO":
                self._macro()
            elif kw == "SITE":
                self._site()
            elif kw == "VIA":
                self._via()
            elif kw in _SKIPPED_BLOCKS:
                ts.next()
                name = ts.next().text
                ts.skip_block(name)
            elif kw in ("SPACING", "PROPERTYDEFINITIONS"):
                ts.next()
                ts.skip_block(kw)
            elif kw == "BEGINEXT":
                while not ts.at_end() and ts.next().upper != "ENDEXT":
                    pass
            elif kw in _HEADER_STATEMENTS:
                ts.statement()
            else:
                self.skipped += 1
                logger.warning("LEF line %s: skipping unsupported statement %s", tok.line, tok.text)
                ts.statement()
        if self.dbu is None:
            raise ParseError("missing UNITS / DATABASE MICRONS", None, ts.source)
        names = [layer.name for layer in self.layers]
        if len(set(names)) != len(names):
            raise ParseError("duplicate LAYER name", None, ts.source)
        return TechLibrary(self.dbu, self.layers, self.macros, self.sites, self.vias, self.skipped)

    def _units(self) -> None:
        ts = self.ts
        ts.expect("UNITS")
        while True:
            if ts.accept("END"):
                ts.expect("UNITS")
                return
            stmt = ts.statement()
            if stmt and stmt[0].upper == "DATABASE":
                if len(stmt) != 3 or stmt[1].upper != "MICRONS":
                    raise ts.error("malformed DATABASE MICRONS statement", stmt[0].line)
                value = ts.integer(stmt[2])
                if value <= 0:
                    raise ts.error("DATABASE MICRONS must be positive", stmt[0].line)
                self.dbu = value

    def _layer(self) -> None:
        ts = self.ts
        start = ts.expect("LAYER")
        name = ts.next().text
        layer = Layer(name=name, type="")
        width_um = None
        while True:
            if ts.accept("END"):
                end = ts.next()
                if end.text != name:
                    raise ts.error(f"LAYER {name} closed by END {end.text}", end.line)
                break
            stmt = ts.statement()
            if not stmt:
                continue
            kw = stmt[0].upper
            if kw == "TYPE" and len(stmt) >= 2:
                layer.type = stmt[1].upper
            elif kw == "DIRECTION" and len(stmt) >= 2:
                layer.direction = stmt[1].upper
            elif kw == "WIDTH" and len(stmt) == 2:
                width_um = ts.number(stmt[1])
        if width_um is not None:
            dbu = self._need_dbu(start.line)
            if width_um <= 0:
                raise ts.error(f"layer {name} has non-positive WIDTH", start.line)
            layer.min_width = to_dbu(width_um, dbu)
        if layer.is_routing and layer.min_width is None:
            raise ts.error(f"routing layer {name} has no WIDTH", start.line)
        self.layers.append(layer)

    def _via(self) -> None:
        ts = self.ts
        ts.expect("VIA")
        name = ts.next().text
        while ts.accept("DEFAULT") or ts.accept("GENERATED"):
            pass
        layers: list[str] = []
        while True:
            if ts.accept("END"):
                ts.expect(name)
                break
            stmt = ts.statement()
            if not stmt:
                continue
            kw = stmt[0].upper
            if kw == "LAYER" and len(stmt) >= 2:
                layers.append(stmt[1].text)
            elif kw == "LAYERS":
                layers.extend(t.text for t in stmt[1:4])
        self.vias[name] = tuple(layers)

    def _site(self) -> None:
        ts = self.ts
        start = ts.expect("SITE")
        name = ts.next().text
        site = Site(name)
        while True:
            if ts.accept("END"):
                ts.expect(name)
                break
            stmt = ts.statement()
            if not stmt:
                continue
            kw = stmt[0].upper
            if kw == "CLASS" and len(stmt) >= 2:
                site.cls = stmt[1].upper
            elif kw == "SIZE":
                w, h = self._size(stmt)
                dbu = self._need_dbu(start.line)
                site.width, site.height = to_dbu(w, dbu), to_dbu(h, dbu)
        self.sites[name] = site

    def _size(self, stmt: list[Token]) -> tuple[float, float]:
        if len(stmt) != 4 or stmt[2].upper != "BY":
            raise self.ts.error("malformed SIZE statement, expected SIZE w BY h", stmt[0].line)
        return self.ts.number(stmt[1]), self.ts.number(stmt[3])

    def _macro(self) -> None:
        ts = self.ts
        start = ts.expect("MACRO")
        name = ts.next().text
        macro = Macro(name)
        while True:
            tok = ts.peek()
            if tok is None:
                raise ts.error(f"unterminated MACRO {name}", start.line)
            kw = tok.upper
            if kw == "END":
                ts.next()
                end = ts.next()
                if end.text != name:
                    raise ts.error(f"MACRO {name} closed by END {end.text}", end.line)
                break
            if kw == "PIN":
                pin = self._pin()
                macro.pins[pin.name] = pin
            elif kw == "OBS":
                ts.next()
                self._port_body()
            else:
                stmt = ts.statement()
                if not stmt:
                    continue
                if kw == "CLASS" and len(stmt) >= 2:
                    macro.cls = " ".join(t.upper for t in stmt[1:])
                elif kw == "SIZE":
                    w, h = self._size(stmt)
                    dbu = self._need_dbu(stmt[0].line)
                    macro.width, macro.height = to_dbu(w, dbu), to_dbu(h, dbu)
                elif kw == "SITE" and len(stmt) >= 2:
                    macro.site = stmt[1].text
        if macro.width <= 0 or macro.height <= 0:
            raise ts.error(f"MACRO {name} has no positive SIZE", start.line)
        self.macros[name] = macro

    def _pin(self) -> MacroPin:
        ts = self.ts
        ts.expect("PIN")
        name = ts.next().text
        pin = MacroPin(name)
        while True:
            tok = ts.peek()
            if tok is None:
                raise ts.error(f"unterminated PIN {name}")
            kw = tok.upper
            if kw == "END":
                ts.next()
                end = ts.next()
                if end.text != name:
                    raise ts.error(f"PIN {name} closed by END {end.text}", end.line)
                return pin
            if kw == "PORT":
                ts.next()
                pin.rects.extend(self._port_body())
                continue
            stmt = ts.statement()
            if not stmt:
                continue
            if kw == "DIRECTION" and len(stmt) >= 2:
                pin.direction = stmt[1].upper
            elif kw == "USE" and len(stmt) >= 2:
                pin.use = stmt[1].upper

    def _port_body(self) -> list[tuple[str, Rect]]:
        """PORT/OBS contents up to the bare END. Returns (layer, rect) pairs."""
        ts = self.ts
        rects: list[tuple[str, Rect]] = []
        layer = None
        while True:
            if ts.accept("END"):
                return rects
            stmt = ts.statement()
            if not stmt:
                continue
            kw = stmt[0].upper
            if kw == "LAYER":
                layer = stmt[1].text
            elif kw == "RECT":
                vals = [t for t in stmt[1:]]
                if vals and vals[0].upper == "MASK":
                    vals = vals[2:]
                if len(vals) != 4:
                    raise ts.error("RECT needs four coordinates", stmt[0].line)
                if layer is None:
                    raise ts.error("RECT before LAYER", stmt[0].line)
                dbu = self._need_dbu(stmt[0].line)
                xa, ya, xb, yb = (to_dbu(ts.number(v), dbu) for v in vals)
                rects.append((layer, Rect.from_corners(xa, ya, xb, yb)))
            elif kw == "POLYGON":
                self.skipped += 1


def write_lef(tech: TechLibrary) -> str:
    """Canonical LEF text for the supported subset."""
    d = tech.dbu_per_micron
    out = ["VERSION 5.8 ;", 'BUSBITCHARS "[]" ;', 'DIVIDERCHAR "/" ;', "",
           "UNITS", f"  DATABASE MICRONS {d} ;", "END UNITS", ""]
    for site in tech.sites.values():
        out += [f"SITE {site.name}", f"  CLASS {site.cls} ;",
                f"  SIZE {fmt_um(site.width, d)} BY {fmt_um(site.height, d)} ;",
                f"END {site.name}", ""]
    for layer in tech.layers:
        out.append(f"LAYER {layer.name}")
        out.append(f"  TYPE {layer.type} ;")
        if layer.direction:
            out.append(f"  DIRECTION {layer.direction} ;")
        if layer.min_width is not None:
            out.append(f"  WIDTH {fmt_um(layer.min_width, d)} ;")
        out += [f"END {layer.name}", ""]
    for via, layers in tech.vias.items():
        out.append(f"VIA {via} DEFAULT")
        out += [f"  LAYER {name} ;" for name in layers]
        out += [f"END {via}", ""]
    for macro in tech.macros.values():
        out.append(f"MACRO {macro.name}")
        out.append(f"  CLASS {macro.cls} ;")
        out.append("  ORIGIN 0 0 ;")
        out.append(f"  SIZE {fmt_um(macro.width, d)} BY {fmt_um(macro.height, d)} ;")
        if macro.site:
            out.append(f"  SITE {macro.site} ;")
        for pin in macro.pins.values():
            out += [f"  PIN {pin.name}", f"    DIRECTION {pin.direction} ;", f"    USE {pin.use} ;"]
            if pin.rects:
                out.append("    PORT")
                last = None
                for layer_name, r in pin.rects:
                    if layer_name != last:
                        out.append(f"      LAYER {layer_name} ;")
                        last = layer_name
                    out.append("        RECT " + " ".join(fmt_um(v, d) for v in (r.x0, r.y0, r.x1, r.y1)) + " ;")
                out.append("    END")
            out.append(f"  END {pin.name}")
        out += [f"END {macro.name}", ""]
    out.append("END LIBRARY")
    return "\n".join(out) + "\n"
