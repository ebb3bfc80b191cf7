"""Path reports in the OpenSTA ``report_checks`` text layout.

Each path block starts at ``Startpoint:``. Numeric columns are assigned to
the column header (``Fanout Cap Slew Delay Time Description``) by right-edge
alignment, so blank cells are tolerated. Lines ending in ``(net)`` carry the
net fanout and capacitance; they are folded into the following sink point.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field

from ..errors import ParseError

logger = logging.getLogger(__name__)

SLACK_TOLERANCE = 1e-6  # ns

_NUM = re.compile(r"-?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?$")
_HEADER_KEYS = ("Startpoint:", "Endpoint:", "Path Group:", "Path Type:")
_KNOWN_TEXT = re.compile(
    r"^(clock |clock network delay|clock reconvergence pessimism|input external delay|"
    r"output external delay|library (setup|hold|recovery|removal) time|data arrival time|"
    r"data required time|slack|time borrowed|clock uncertainty|inter-clock uncertainty|"
    r"propagated clock|max_delay|min_delay|path (gating|check))")
_IGNORABLE = re.compile(r"^(-+|=+|No paths found\.?|Report:.*|Corner:.*|Scene:.*|\*+.*|"
                        r"report_\w+.*|>+.*|Path Group:.*|Fanout.*Description)$")


@dataclass(frozen=True)
class TimingPoint:
    pin: str
    kind: str  # start | cell_arc | net_arc
    delay: float | None
    arrival: float
    slew: float | None = None
    capacitance: float | None = None  # fF, net arcs only
    fanout: int | None = None
    edge: str | None = None  # rise | fall
    cell: str | None = None  # cell name, or "in"/"out" for ports
    net: str | None = None

    @property
    def instance(self) -> str | None:
        return _instance_of(self.pin, self.cell)


@dataclass(frozen=True)
class TimingPathRecord:
    startpoint: str
    endpoint: str
    check_type: str  # setup | hold
    arrival_time: float
    required_time: float
    slack: float
    points: tuple[TimingPoint, ...] = ()
    path_group: str | None = None
    warning: str | None = field(default=None, compare=False)

    @property
    def key(self) -> tuple[str, str, str]:
        return self.startpoint, self.endpoint, self.check_type

    @property
    def expected_slack(self) -> float:
        if self.check_type == "hold":
            return self.arrival_time - self.required_time
        return self.required_time - self.arrival_time

    @property
    def slack_error(self) -> float:
        return abs(self.slack - self.expected_slack)


def _instance_of(pin: str, cell: str | None) -> str | None:
    if cell in ("in", "out", "inout") or "/" not in pin:
        return None
    return pin.rsplit("/", 1)[0]


class _Columns:
    def __init__(self, header: str):
        self.edges: list[tuple[str, int]] = []
        for m in re.finditer(r"\S+", header):
            if m.group(0) != "Description":
                self.edges.append((m.group(0), m.end()))
        desc = header.find("Description")
        self.desc_col = desc if desc >= 0 else None

    def assign(self, line: str) -> tuple[dict[str, str], str, str | None]:
        """Split a data line into {column: number text}, description, edge marker."""
        values: dict[str, str] = {}
        rest_start = len(line)
        for m in re.finditer(r"\S+", line):
            tok = m.group(0)
            if not _NUM.match(tok):
                rest_start = m.start()
                break
            name = min(self.edges, key=lambda e: abs(e[1] - m.end()))[0]
            values[name] = tok
        rest = line[rest_start:].strip()
        edge = None
        if rest[:2] in ("^ ", "v ") or rest in ("^", "v"):
            edge = "rise" if rest[0] == "^" else "fall"
            rest = rest[1:].strip()
        return values, rest, edge


_DEFAULT_HEADER = "Fanout     Cap    Slew   Delay    Time   Description"


def parse_sta_report(text: str, strict: bool = False, source: str | None = None
                     ) -> list[TimingPathRecord]:
    """Parse every path block. ``strict`` rejects lines of unknown shape."""
    lines = text.splitlines()
    blocks: list[tuple[int, int]] = []
    for i, line in enumerate(lines):
        if line.strip().startswith("Startpoint:"):
            if blocks:
                blocks[-1] = (blocks[-1][0], i)
            blocks.append((i, len(lines)))
    if not blocks:
        for i, line in enumerate(lines, start=1):
            s = line.strip()
            if strict and s and not _IGNORABLE.match(s):
                raise ParseError(f"unrecognized line {s!r}", i, source)
        return []
    if strict:
        for i in range(blocks[0][0]):
            s = lines[i].strip()
            if s and not _IGNORABLE.match(s):
                raise ParseError(f"unrecognized line {s!r}", i + 1, source)
    return [_parse_block(lines, a, b, strict, source) for a, b in blocks]


def _parse_block(lines: list[str], start: int, stop: int, strict: bool, source: str | None
                 ) -> TimingPathRecord:
    header: dict[str, str] = {}
    cols = _Columns(_DEFAULT_HEADER)
    points: list[TimingPoint] = []
    pending_net: tuple[str, float | None, int | None] | None = None
    arrival = required = slack = None
    section = "head"

    def fail(msg: str, i: int) -> ParseError:
        return ParseError(msg, i + 1, source)

    for i in range(start, stop):
        raw = lines[i].rstrip()
        s = raw.strip()
        if not s:
            continue
        matched_header = False
        for key in _HEADER_KEYS:
            if s.startswith(key):
                header[key[:-1]] = s[len(key):].strip()
                matched_header = True
        if matched_header:
            continue
        if s.startswith("Fanout") or (s.endswith("Description") and "Time" in s):
            cols = _Columns(raw)
            section = "data"
            continue
        if set(s) <= {"-", "="}:
            continue
        values, desc, edge = cols.assign(raw)
        if desc == "data arrival time":
            if section == "data":
                arrival = _num(values.get("Time"), i, source)
                section = "required"
            continue
        if desc == "data required time":
            if required is None:
                required = _num(values.get("Time"), i, source)
            section = "summary"
            continue
        if desc.startswith("slack"):
            slack = _num(values.get("Time"), i, source)
            continue
        if section != "data":
            if strict and not (_KNOWN_TEXT.match(desc) or _pin_line(desc) or _IGNORABLE.match(s)):
                raise fail(f"unrecognized line {s!r}", i)
            continue
        if desc.endswith("(net)"):
            net = desc[: -len("(net)")].strip()
            cap = _opt(values.get("Cap"), i, source)
            fan = values.get("Fanout")
            pending_net = (net, cap, int(float(fan)) if fan is not None else None)
            continue
        pin = _pin_line(desc)
        if pin is None:
            if strict and not _KNOWN_TEXT.match(desc):
                raise fail(f"unrecognized line {s!r}", i)
            continue
        name, cell = pin
        t = _num(values.get("Time"), i, source)
        delay = _opt(values.get("Delay"), i, source)
        slew = _opt(values.get("Slew"), i, source)
        if not points:
            kind = "start"
        else:
            prev = points[-1]
            same = (_instance_of(name, cell) is not None
                    and _instance_of(name, cell) == _instance_of(prev.pin, prev.cell))
            kind = "cell_arc" if same else "net_arc"
        net = cap = fan = None
        if kind == "net_arc" and pending_net is not None:
            net, cap, fan = pending_net
        if kind != "cell_arc":
            pending_net = None
        points.append(TimingPoint(name, kind, delay, t, slew, cap, fan, edge, cell, net))
    if "Startpoint" not in header or "Endpoint" not in header:
        raise fail("path block without Startpoint/Endpoint", start)
    if slack is None:
        raise fail("path block has no slack line", start)
    if arrival is None:
        raise fail("path block has no data arrival time", start)
    if required is None:
        raise fail("path block has no data required time", start)
    ptype = header.get("Path Type", "max").split()[0].lower()
    if ptype not in ("max", "min"):
        raise fail(f"unknown Path Type {ptype!r}", start)
    rec = TimingPathRecord(
        startpoint=header["Startpoint"].split()[0],
        endpoint=header["Endpoint"].split()[0],
        check_type="setup" if ptype == "max" else "hold",
        arrival_time=arrival,
        required_time=required,
        slack=slack,
        points=tuple(points),
        path_group=header.get("Path Group"),
    )
    if rec.slack_error > SLACK_TOLERANCE:
        msg = f"slack {slack} disagrees with required/arrival by {rec.slack_error:.3g} ns"
        logger.warning("%s: %s", rec.endpoint, msg)
        rec = TimingPathRecord(rec.startpoint, rec.endpoint, rec.check_type, rec.arrival_time,
                               rec.required_time, rec.slack, rec.points, rec.path_group, msg)
    return rec


def _pin_line(desc: str) -> tuple[str, str] | None:
    m = re.match(r"^(\S+) \(([^()]+)\)$", desc)
    if not m or m.group(2) == "net":
        return None
    return m.group(1), m.group(2)


def _num(text: str | None, i: int, source: str | None) -> float:
    if text is None:
        raise ParseError("expected a value in the Time column", i + 1, source)
    return float(text)


def _opt(text: str | None, i: int, source: str | None) -> float | None:
    return None if text is None else float(text)


def _fmt(v: float | int | None, width: int) -> str:
    return " " * width if v is None else f"{v!r}".rjust(width)


def write_sta_report(records: list[TimingPathRecord]) -> str:
    """Render records in the same layout; floats use shortest round-trip form."""
    w = 24
    head = "".join(h.rjust(w) for h in ("Fanout", "Cap", "Slew", "Delay", "Time")) + "   Description"
    rule = "-" * len(head)
    out: list[str] = []
    for r in records:
        out += [f"Startpoint: {r.startpoint}", f"Endpoint: {r.endpoint}"]
        if r.path_group is not None:
            out.append(f"Path Group: {r.path_group}")
        out += [f"Path Type: {'max' if r.check_type == 'setup' else 'min'}", "", head, rule]
        for p in r.points:
            if p.net is not None or p.capacitance is not None or p.fanout is not None:
                out.append(_fmt(p.fanout, w) + _fmt(p.capacitance, w) + " " * (3 * w)
                           + f"   {p.net or '-'} (net)")
            edge = {"rise": "^", "fall": "v"}.get(p.edge, " ")
            out.append(" " * (2 * w) + _fmt(p.slew, w) + _fmt(p.delay, w) + _fmt(p.arrival, w)
                       + f" {edge} {p.pin} ({p.cell or 'in'})")
        out.append(" " * (4 * w) + _fmt(r.arrival_time, w) + "   data arrival time")
        out += ["", " " * (4 * w) + _fmt(r.required_time, w) + "   data required time", rule]
        out.append(" " * (4 * w) + _fmt(r.slack, w) + "   slack")
        out.append("")
    return "\n".join(out)
