"""Gridded ``x,y,value`` CSV samples (IR drop, EM) with units from the header.

Header cells may carry a unit as ``name(unit)``, ``name [unit]`` or
``name_unit`` for the usual suffixes; coordinates default to microns.
"""

from __future__ import annotations

import csv
import io
import math
import re
from dataclasses import dataclass, field

import numpy as np

from ..errors import ParseError

_PAREN = re.compile(r"^\s*([^(\[]+?)\s*[(\[]\s*([^)\]]*)\s*[)\]]\s*$")
_SUFFIX = re.compile(r"^(.*?)_(um|nm|mm|mv|v|uv|a|ma|ua|a_per_um2|ma_per_um2)$", re.IGNORECASE)


@dataclass(frozen=True)
class GridSample:
    x: float
    y: float
    value: float


@dataclass
class GridSamples:
    samples: list[GridSample] = field(default_factory=list)
    x_unit: str = "um"
    y_unit: str = "um"
    value_name: str = "value"
    value_unit: str | None = None

    def __len__(self) -> int:
        return len(self.samples)

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        if not self.samples:
            e = np.zeros(0)
            return e, e.copy(), e.copy()
        a = np.array([(s.x, s.y, s.value) for s in self.samples], dtype=np.float64)
        return a[:, 0], a[:, 1], a[:, 2]

    def bounding_box(self) -> tuple[float, float, float, float] | None:
        if not self.samples:
            return None
        xs, ys, _ = self.arrays()
        return float(xs.min()), float(ys.min()), float(xs.max()), float(ys.max())


def _split_unit(cell: str) -> tuple[str, str | None]:
    m = _PAREN.match(cell)
    if m:
        return m.group(1).strip(), m.group(2).strip() or None
    m = _SUFFIX.match(cell.strip())
    if m:
        return m.group(1), m.group(2)
    return cell.strip(), None


def parse_gridded_csv(text: str, die_box_um: tuple[float, float, float, float] | None = None,
                      source: str | None = None) -> GridSamples:
    """Rows of ``x,y,value``; ``die_box_um`` (x0, y0, x1, y1) bounds the coordinates."""
    reader = csv.reader(io.StringIO(text))
    rows = [(i, r) for i, r in enumerate(reader, start=1) if any(c.strip() for c in r)]
    if not rows:
        raise ParseError("missing header row", None, source)
    head_line, head = rows[0]
    if len(head) != 3:
        raise ParseError(f"header must have 3 columns, found {len(head)}", head_line, source)
    (xn, xu), (yn, yu), (vn, vu) = (_split_unit(c) for c in head)
    if xn.lower() != "x" or yn.lower() != "y":
        raise ParseError(f"header must start with x,y columns, found {xn!r},{yn!r}", head_line,
                         source)
    out = GridSamples(x_unit=xu or "um", y_unit=yu or "um", value_name=vn, value_unit=vu)
    for lineno, row in rows[1:]:
        if len(row) != 3:
            raise ParseError(f"expected 3 columns, found {len(row)}", lineno, source)
        try:
            x, y, v = (float(c) for c in row)
        except ValueError:
            raise ParseError(f"non-numeric cell in {row!r}", lineno, source) from None
        if not (math.isfinite(x) and math.isfinite(y) and math.isfinite(v)):
            raise ParseError("non-finite value", lineno, source)
        if die_box_um is not None:
            x0, y0, x1, y1 = die_box_um
            if not (x0 <= x <= x1 and y0 <= y <= y1):
                raise ParseError(f"sample ({x}, {y}) lies outside the die box", lineno, source)
        out.samples.append(GridSample(x, y, v))
    return out


def write_gridded_csv(gs: GridSamples) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    unit = f"({gs.value_unit})" if gs.value_unit else ""
    w.writerow([f"x({gs.x_unit})", f"y({gs.y_unit})", f"{gs.value_name}{unit}"])
    for s in gs.samples:
        w.writerow([repr(s.x), repr(s.y), repr(s.value)])
    return buf.getvalue()
