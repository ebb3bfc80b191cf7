"""Integer rectangles in database units and DEF orientation transforms."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable


@dataclass(frozen=True, order=True)
class Rect:
    """Axis-aligned rectangle with integer DBU corners, ``x0 <= x1`` and ``y0 <= y1``."""

    x0: int
    y0: int
    x1: int
    y1: int

    @classmethod
    def from_corners(cls, xa: int, ya: int, xb: int, yb: int) -> "Rect":
        return cls(min(xa, xb), min(ya, yb), max(xa, xb), max(ya, yb))

    @property
    def width(self) -> int:
        return self.x1 - self.x0

    @property
    def height(self) -> int:
        return self.y1 - self.y0

    @property
    def area(self) -> int:
        return self.width * self.height

    @property
    def center(self) -> tuple[float, float]:
        return ((self.x0 + self.x1) / 2, (self.y0 + self.y1) / 2)

    def contains(self, other: "Rect") -> bool:
        return (self.x0 <= other.x0 and self.y0 <= other.y0
                and other.x1 <= self.x1 and other.y1 <= self.y1)

    def contains_point(self, x: float, y: float) -> bool:
        return self.x0 <= x <= self.x1 and self.y0 <= y <= self.y1

    def translate(self, dx: int, dy: int) -> "Rect":
        return Rect(self.x0 + dx, self.y0 + dy, self.x1 + dx, self.y1 + dy)

    def union(self, other: "Rect") -> "Rect":
        return Rect(min(self.x0, other.x0), min(self.y0, other.y0),
                    max(self.x1, other.x1), max(self.y1, other.y1))

    def intersection_area(self, other: "Rect") -> int:
        w = min(self.x1, other.x1) - max(self.x0, other.x0)
        h = min(self.y1, other.y1) - max(self.y0, other.y0)
        if w <= 0 or h <= 0:
            return 0
        return w * h


def bounding_box(rects: Iterable[Rect]) -> Rect | None:
    box = None
    for r in rects:
        box = r if box is None else box.union(r)
    return box


ORIENTATIONS = ("N", "S", "E", "W", "FN", "FS", "FE", "FW")
_SWAPS_AXES = {"E", "W", "FE", "FW"}


def placed_size(width: int, height: int, orient: str) -> tuple[int, int]:
    """Footprint of a ``width x height`` cell after applying ``orient``."""
    if orient in _SWAPS_AXES:
        return height, width
    return width, height


def transform_point(x: int, y: int, width: int, height: int, orient: str) -> tuple[int, int]:
    """Map a point in cell coordinates into the placed frame (lower-left at 0,0)."""
    if orient == "N":
        return x, y
    if orient == "S":
        return width - x, height - y
    if orient == "FN":
        return width - x, y
    if orient == "FS":
        return x, height - y
    if orient == "W":
        return height - y, x
    if orient == "E":
        return y, width - x
    if orient == "FW":
        return y, x
    if orient == "FE":
        return height - y, width - x
    raise ValueError(f"unknown orientation {orient!r}")


def place_rect(rect: Rect, width: int, height: int, orient: str, origin: tuple[int, int]) -> Rect:
    """Place a cell-local rectangle of a ``width x height`` cell at ``origin``."""
    ax, ay = transform_point(rect.x0, rect.y0, width, height, orient)
    bx, by = transform_point(rect.x1, rect.y1, width, height, orient)
    return Rect.from_corners(ax, ay, bx, by).translate(origin[0], origin[1])
