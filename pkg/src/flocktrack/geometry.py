"""Shared geometric and video domain types.

Boxes are center-based (cx, cy, w, h) everywhere; corner forms are converted
only at I/O boundaries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

Point = Tuple[float, float]


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned box stored as center + size, in pixels."""

    cx: float
    cy: float
    w: float
    h: float

    def __post_init__(self):
        if not (self.w > 0 and self.h > 0):
            raise ValueError(f"box size must be positive, got w={self.w}, h={self.h}")
        if not (math.isfinite(self.cx) and math.isfinite(self.cy)):
            raise ValueError("box center must be finite")

    @property
    def x1(self) -> float:
        return self.cx - self.w / 2.0

    @property
    def y1(self) -> float:
        return self.cy - self.h / 2.0

    @property
    def x2(self) -> float:
        return self.cx + self.w / 2.0

    @property
    def y2(self) -> float:
        return self.cy + self.h / 2.0

    @property
    def area(self) -> float:
        return self.w * self.h

    @property
    def center(self) -> Point:
        return (self.cx, self.cy)

    def dilated(self, fraction: float) -> "BoundingBox":
        """Return a copy grown by `fraction` of its size on each side."""
        return BoundingBox(self.cx, self.cy, self.w * (1 + 2 * fraction), self.h * (1 + 2 * fraction))

    def contains(self, p: Point) -> bool:
        return self.x1 <= p[0] <= self.x2 and self.y1 <= p[1] <= self.y2

    @staticmethod
    def from_corners(x1: float, y1: float, x2: float, y2: float) -> "BoundingBox":
        return BoundingBox((x1 + x2) / 2.0, (y1 + y2) / 2.0, x2 - x1, y2 - y1)


@dataclass(frozen=True)
class Detection:
    """One detector output: a box with a confidence, in one frame."""

    frame: int
    box: BoundingBox
    confidence: float = 1.0

    def __post_init__(self):
        if self.frame < 0:
            raise ValueError(f"frame index must be >= 0, got {self.frame}")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence must be in [0, 1], got {self.confidence}")


@dataclass(frozen=True)
class VideoMeta:
    """Clip geometry and frame rate."""

    width: int = 1280
    height: int = 720
    fps: float = 30.0

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0 or self.fps <= 0:
            raise ValueError("video meta fields must be strictly positive")


def polygon_area(poly: Sequence[Point]) -> float:
    """Signed shoelace area (positive for counter-clockwise vertex order)."""
    n = len(poly)
    s = 0.0
    for i in range(n):
        x1, y1 = poly[i]
        x2, y2 = poly[(i + 1) % n]
        s += x1 * y2 - x2 * y1
    return s / 2.0


def polygon_centroid(poly: Sequence[Point]) -> Point:
    """Area centroid of a simple polygon."""
    a = polygon_area(poly)
    if a == 0.0:
        raise ValueError("degenerate polygon has no centroid")
    cx = cy = 0.0
    n = len(poly)
    for i in range(n):
        x1, y1 = poly[i]
        x2, y2 = poly[(i + 1) % n]
        cross = x1 * y2 - x2 * y1
        cx += (x1 + x2) * cross
        cy += (y1 + y2) * cross
    return (cx / (6.0 * a), cy / (6.0 * a))


def dilate_polygon(poly: Sequence[Point], margin: float) -> list:
    """Push every vertex away from the centroid by `margin` pixels."""
    cx, cy = polygon_centroid(poly)
    out = []
    for x, y in poly:
        dx, dy = x - cx, y - cy
        d = math.hypot(dx, dy)
        if d == 0.0:
            out.append((x, y))
        else:
            out.append((x + margin * dx / d, y + margin * dy / d))
    return out


@dataclass(frozen=True)
class PenLayout:
    """Pen geometry: fixture polygons and the walkable bounds."""

    feeder: Tuple[Point, ...]
    drinker: Tuple[Point, ...]
    pen_bounds: BoundingBox

    def __post_init__(self):
        for name, poly in (("feeder", self.feeder), ("drinker", self.drinker)):
            if len(poly) < 3:
                raise ValueError(f"{name} polygon needs at least 3 vertices")
            if abs(polygon_area(poly)) <= 0.0:
                raise ValueError(f"{name} polygon is degenerate")


@dataclass(frozen=True)
class TrackRecord:
    """One tracked box, with its stable identity, in one frame."""

    frame: int
    track_id: int
    box: BoundingBox
    head: Optional[BoundingBox] = None


def iou(a: BoundingBox, b: BoundingBox) -> float:
    """Intersection-over-union of two boxes, in [0, 1]."""
    ix = min(a.x2, b.x2) - max(a.x1, b.x1)
    iy = min(a.y2, b.y2) - max(a.y1, b.y1)
    if ix <= 0.0 or iy <= 0.0:
        return 0.0
    inter = ix * iy
    return inter / (a.area + b.area - inter)


def point_in_polygon(p: Point, poly: Sequence[Point]) -> bool:
    """True iff p lies inside `poly` or on its boundary.

    Ray casting with an explicit on-edge check so boundary points count as
    inside (proximity tests err toward detecting behavior).
    """
    x, y = p
    n = len(poly)
    inside = False
    for i in range(n):
        x1, y1 = poly[i]
        x2, y2 = poly[(i + 1) % n]
        # on-segment check
        cross = (x2 - x1) * (y - y1) - (y2 - y1) * (x - x1)
        if abs(cross) < 1e-9:
            if min(x1, x2) - 1e-9 <= x <= max(x1, x2) + 1e-9 and min(y1, y2) - 1e-9 <= y <= max(y1, y2) + 1e-9:
                return True
        if (y1 > y) != (y2 > y):
            xint = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if x < xint:
                inside = not inside
    return inside
