"""SPEF (IEEE 1481) subset: header units, name map, and *D_NET / *R_NET totals.

Only per-net totals are kept. Ground capacitors have one node, coupling
capacitors two; both detailed (with *CONN) and reduced net sections parse.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

from ..errors import ParseError

_C_SCALE = {"F": 1e15, "PF": 1e3, "NF": 1e6, "UF": 1e9, "FF": 1.0, "AF": 1e-3}
_R_SCALE = {"OHM": 1.0, "KOHM": 1e3, "MOHM": 1e6}
_T_SCALE = {"S": 1e9, "MS": 1e6, "US": 1e3, "NS": 1.0, "PS": 1e-3, "FS": 1e-6}


@dataclass(frozen=True)
class NetParasitics:
    total_resistance: float = 0.0  # ohm
    total_capacitance: float = 0.0  # fF, ground caps only
    total_coupling_capacitance: float = 0.0  # fF


@dataclass
class ParasiticSet:
    design: str = ""
    nets: dict[str, NetParasitics] = field(default_factory=dict)

    def __getitem__(self, name: str) -> NetParasitics:
        return self.nets[name]

    def __len__(self) -> int:
        return len(self.nets)


def _normalize(name: str) -> str:
    return name.replace("\\", "")


def parse_spef(text: str, source: str | None = None) -> ParasiticSet:
    lines = text.splitlines()
    design = ""
    c_scale = r_scale = None
    name_map: dict[str, str] = {}
    nets: dict[str, NetParasitics] = {}
    section = None
    current: str | None = None
    r_sum = c_sum = cc_sum = 0.0
    header_total: float | None = None
    saw_cap = False
    current_line = 0

    def fail(msg: str, lineno: int) -> ParseError:
        return ParseError(msg, lineno, source)

    def resolve(tok: str) -> str:
        # "*12" or "*12:A" -> mapped name (pin suffix preserved)
        if tok.startswith("*"):
            base, sep, pin = tok.partition(":")
            if base in name_map:
                return name_map[base] + sep + pin
        return _normalize(tok)

    def value(tok: str, lineno: int) -> float:
        try:
            v = float(tok)
        except ValueError:
            raise fail(f"expected a number, found {tok!r}", lineno) from None
        if not math.isfinite(v):
            raise fail(f"non-finite value {tok!r}", lineno)
        if v < 0:
            raise fail(f"negative element value {v}", lineno)
        return v

    def close(lineno: int) -> None:
        nonlocal current
        if current is None:
            raise fail("*END without an open net section", lineno)
        c = c_sum
        if not saw_cap and header_total is not None:
            c = header_total  # reduced nets often carry only the header total
        nets[current] = NetParasitics(r_sum, c, cc_sum)
        current = None

    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("//", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        head = parts[0].upper()
        if head in ("*D_NET", "*R_NET"):
            if current is not None:
                raise fail(f"net {current} not closed before {parts[0]}", lineno)
            if c_scale is None or r_scale is None:
                raise fail("missing *C_UNIT or *R_UNIT header before first net", lineno)
            if len(parts) < 2:
                raise fail(f"{parts[0]} needs a net name", lineno)
            name = resolve(parts[1])
            if name in nets:
                raise fail(f"duplicate net section {name}", lineno)
            header_total = value(parts[2], lineno) * c_scale if len(parts) > 2 else None
            current, current_line = name, lineno
            r_sum = c_sum = cc_sum = 0.0
            saw_cap = False
            section = None
        elif head == "*END":
            close(lineno)
            section = None
        elif head in ("*CONN", "*CAP", "*RES", "*INDUC"):
            if current is None:
                raise fail(f"{parts[0]} outside a net section", lineno)
            section = head
            saw_cap = saw_cap or head == "*CAP"
        elif head == "*NAME_MAP":
            section = head
        elif head in ("*PORTS", "*PHYSICAL_PORTS", "*POWER_NETS", "*GROUND_NETS", "*DEFINE",
                      "*PDEFINE"):
            section = head
        elif head == "*DESIGN":
            design = " ".join(parts[1:]).strip('"')
        elif head == "*C_UNIT":
            c_scale = _unit(parts, _C_SCALE, lineno, source)
        elif head == "*R_UNIT":
            r_scale = _unit(parts, _R_SCALE, lineno, source)
        elif head == "*T_UNIT":
            _unit(parts, _T_SCALE, lineno, source)
        elif head.startswith("*") and current is None and section != "*NAME_MAP":
            continue  # other header statements
        elif section == "*NAME_MAP":
            if len(parts) < 2:
                raise fail("malformed *NAME_MAP entry", lineno)
            name_map[parts[0]] = _normalize(" ".join(parts[1:]))
        elif section == "*CAP":
            if len(parts) == 3:
                c_sum += value(parts[2], lineno) * c_scale
            elif len(parts) == 4:
                cc_sum += value(parts[3], lineno) * c_scale
            else:
                raise fail("malformed *CAP element", lineno)
        elif section == "*RES":
            if len(parts) != 4:
                raise fail("malformed *RES element", lineno)
            r_sum += value(parts[3], lineno) * r_scale
        elif section in ("*CONN", "*INDUC", "*PORTS", "*PHYSICAL_PORTS", "*POWER_NETS",
                         "*GROUND_NETS", "*DEFINE", "*PDEFINE"):
            continue
        else:
            raise fail(f"unexpected line {line!r}", lineno)
    if current is not None:
        raise fail(f"net {current} has no *END", current_line)
    if c_scale is None or r_scale is None:
        raise ParseError("missing *C_UNIT or *R_UNIT header", None, source)
    return ParasiticSet(design, nets)


_UNIT_RE = re.compile(r"^([0-9.eE+-]+)$")


def _unit(parts: list[str], table: dict[str, float], lineno: int, source: str | None) -> float:
    if len(parts) != 3 or not _UNIT_RE.match(parts[1]) or parts[2].upper() not in table:
        raise ParseError(f"malformed unit statement {' '.join(parts)!r}", lineno, source)
    return float(parts[1]) * table[parts[2].upper()]


def write_spef(ps: ParasiticSet) -> str:
    """Minimal SPEF reproducing the totals: one element of each kind per net."""
    out = ['*SPEF "IEEE 1481-1998"', f'*DESIGN "{ps.design}"', "*DIVIDER /", "*DELIMITER :",
           "*BUS_DELIMITER [ ]", "*T_UNIT 1 NS", "*C_UNIT 1 FF", "*R_UNIT 1 OHM", ""]
    for name, p in ps.nets.items():
        total = p.total_capacitance + p.total_coupling_capacitance
        out.append(f"*D_NET {name} {total!r}")
        out.append("*CAP")
        if p.total_capacitance:
            out.append(f"1 {name}:1 {p.total_capacitance!r}")
        if p.total_coupling_capacitance:
            out.append(f"2 {name}:1 {name}:cc {p.total_coupling_capacitance!r}")
        if p.total_resistance:
            out.append("*RES")
            out.append(f"1 {name}:1 {name}:2 {p.total_resistance!r}")
        out.append("*END")
        out.append("")
    return "\n".join(out)
