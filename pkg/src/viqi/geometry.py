"""Rectangle geometry behind the visual grouping measures.

Coordinates are screen pixels with y growing downward, so the *bottom*
edge of a box is ``y_max``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable

DEFAULT_TOLERANCE = 2.0

# Proximity between two boxes that share no aligned edge. Compares greater
# than every finite proximity, so such boxes are never density neighbours.
UNREACHABLE = math.inf


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite point ({self.x}, {self.y})")


@dataclass(frozen=True)
class Rect:
    """Axis-aligned box ``[x_min, y_min, x_max, y_max]`` (closed)."""

    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self) -> None:
        coords = (self.x_min, self.y_min, self.x_max, self.y_max)
        if not all(math.isfinite(c) for c in coords):
            raise ValueError(f"non-finite rectangle {list(coords)}")
        if self.x_min > self.x_max or self.y_min > self.y_max:
            raise ValueError(f"inverted rectangle {list(coords)}")

    @classmethod
    def from_list(cls, values: Iterable[float]) -> Rect:
        values = list(values)
        if len(values) != 4:
            raise ValueError(f"bbox needs 4 numbers, got {len(values)}")
        return cls(*(float(v) for v in values))

    def as_list(self) -> list[float]:
        return [self.x_min, self.y_min, self.x_max, self.y_max]

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    @property
    def center(self) -> Point:
        return Point((self.x_min + self.x_max) / 2, (self.y_min + self.y_max) / 2)

    def contains_point(self, p: Point) -> bool:
        return self.x_min <= p.x <= self.x_max and self.y_min <= p.y <= self.y_max

    def union(self, other: Rect) -> Rect:
        return Rect(
            min(self.x_min, other.x_min),
            min(self.y_min, other.y_min),
            max(self.x_max, other.x_max),
            max(self.y_max, other.y_max),
        )


def bounding_box(rects: Iterable[Rect]) -> Rect:
    """Tight bounding box of one or more rectangles."""
    it = iter(rects)
    try:
        box = next(it)
    except StopIteration:
        raise ValueError("bounding_box of no rectangles") from None
    for r in it:
        box = box.union(r)
    return box


class AlignmentAxis(Enum):
    BOTTOM = "B"
    TOP = "T"
    LEFT = "L"
    RIGHT = "R"


_EDGE = {
    AlignmentAxis.BOTTOM: "y_max",
    AlignmentAxis.TOP: "y_min",
    AlignmentAxis.LEFT: "x_min",
    AlignmentAxis.RIGHT: "x_max",
}


def rect_min_distance(a: Rect, b: Rect) -> float:
    """Smallest Euclidean distance between any point of ``a`` and any point of ``b``.

    Zero when the rectangles overlap or touch.
    """
    dx = max(0.0, a.x_min - b.x_max, b.x_min - a.x_max)
    dy = max(0.0, a.y_min - b.y_max, b.y_min - a.y_max)
    return math.hypot(dx, dy)


def align_x(a: Rect, b: Rect, axis: AlignmentAxis, tol: float = DEFAULT_TOLERANCE) -> int:
    """1 if the ``axis`` edges of both boxes are within ``tol`` pixels, else 0."""
    if tol < 0:
        raise ValueError(f"negative tolerance {tol}")
    edge = _EDGE[axis]
    return int(abs(getattr(a, edge) - getattr(b, edge)) <= tol)


def align_score(a: Rect, b: Rect, tol: float = DEFAULT_TOLERANCE) -> int:
    """Weighted alignment count in ``[0, 5]``; bottom alignment counts double."""
    if tol < 0:
        raise ValueError(f"negative tolerance {tol}")
    # Same as 2*B + T + L + R via align_x, unrolled because this is the hot path.
    return (
        2 * (abs(a.y_max - b.y_max) <= tol)
        + (abs(a.y_min - b.y_min) <= tol)
        + (abs(a.x_min - b.x_min) <= tol)
        + (abs(a.x_max - b.x_max) <= tol)
    )


def proximity(a: Rect, b: Rect, tol: float = DEFAULT_TOLERANCE) -> float:
    """Distance divided by alignment score.

    Small values mean close, well aligned boxes. Returns ``UNREACHABLE``
    when no edge is aligned.
    """
    score = align_score(a, b, tol)
    if score == 0:
        return UNREACHABLE
    return rect_min_distance(a, b) / score


def is_reachable(value: float) -> bool:
    return value != UNREACHABLE
