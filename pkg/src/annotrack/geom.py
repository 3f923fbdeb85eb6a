"""Continuous normalized coordinates, boxes, IoU, and bilinear grid sampling.

All geometry lives in [0, 1] x [0, 1] so distances and areas are independent
of image resolution. Gridded maps are treated as regular samples of an
underlying continuous signal, sampled at cell centers: cell (r, c) of an
H x W map sits at ((c + 0.5) / W, (r + 0.5) / H). Interior queries use
bilinear interpolation; queries outside the center lattice clamp to the
boundary value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np


class InvalidMapError(ValueError):
    """Raised when an operation needs a grid map with at least one cell."""


@dataclass(frozen=True)
class Point:
    """A location in normalized image coordinates."""

    x: float
    y: float

    def __post_init__(self):
        if not (0.0 <= self.x <= 1.0 and 0.0 <= self.y <= 1.0):
            raise ValueError(f"point outside [0,1]^2: ({self.x}, {self.y})")

    def distance_to(self, other: "Point") -> float:
        dx = self.x - other.x
        dy = self.y - other.y
        return math.sqrt(dx * dx + dy * dy)


@dataclass(frozen=True)
class Box:
    """Axis-aligned box in normalized coordinates, min corner <= max corner."""

    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self):
        if not (0.0 <= self.x_min <= self.x_max <= 1.0):
            raise ValueError(f"invalid box x extent [{self.x_min}, {self.x_max}]")
        if not (0.0 <= self.y_min <= self.y_max <= 1.0):
            raise ValueError(f"invalid box y extent [{self.y_min}, {self.y_max}]")

    @classmethod
    def clamped(cls, x_min: float, y_min: float, x_max: float, y_max: float) -> "Box":
        """Build a box, clamping each coordinate into [0, 1] first."""
        return cls(
            min(max(x_min, 0.0), 1.0),
            min(max(y_min, 0.0), 1.0),
            min(max(x_max, 0.0), 1.0),
            min(max(y_max, 0.0), 1.0),
        )

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    @property
    def area(self) -> float:
        return self.width * self.height


@dataclass(frozen=True, eq=False)
class GridMap:
    """Dense per-cell float vectors: one length-C vector per cell of an H x W grid."""

    values: np.ndarray  # shape (height, width, channels), C-contiguous

    def __post_init__(self):
        v = self.values
        if not isinstance(v, np.ndarray) or v.ndim != 3:
            raise ValueError(f"grid map values must be a (H, W, C) array, got {getattr(v, 'shape', None)}")
        if v.size and not np.all(np.isfinite(v)):
            raise ValueError("grid map contains non-finite values")

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def channels(self) -> int:
        return self.values.shape[2]


def cell_center(row: int, col: int, height: int, width: int) -> Point:
    """Normalized coordinates of the center of cell (row, col) on an H x W grid."""
    return Point((col + 0.5) / width, (row + 0.5) / height)


def _axis_index(coord: float, n: int) -> tuple[int, int, float]:
    """Map a normalized coordinate to (low cell, high cell, fraction) on one axis.

    Fraction 0 means the query sits exactly on the low cell center; queries
    beyond the first/last center clamp (constant extrapolation).
    """
    g = coord * n - 0.5
    if g <= 0.0:
        return 0, 0, 0.0
    if g >= n - 1.0:
        return n - 1, n - 1, 0.0
    i0 = int(math.floor(g))
    i0 = min(i0, n - 1)
    return i0, min(i0 + 1, n - 1), g - i0


def sample_bilinear(grid: GridMap, p: Point) -> np.ndarray:
    """Sample the continuous signal behind a grid map at p.

    Returns a float64 vector of length `grid.channels`. Exact cell-center
    queries return the stored vector; everything else blends the four
    surrounding cells, and the result is kept inside their per-channel hull
    so rounding can never push a sample past a corner value.
    """
    if grid.height == 0 or grid.width == 0 or grid.channels == 0:
        raise InvalidMapError(f"cannot sample an empty {grid.height}x{grid.width}x{grid.channels} map")
    r0, r1, fy = _axis_index(p.y, grid.height)
    c0, c1, fx = _axis_index(p.x, grid.width)
    v = grid.values
    v00 = v[r0, c0].astype(np.float64)
    if fx == 0.0 and fy == 0.0:
        return v00
    v01 = v[r0, c1].astype(np.float64)
    v10 = v[r1, c0].astype(np.float64)
    v11 = v[r1, c1].astype(np.float64)
    if fx == 0.0:
        top, bot = v00, v10
    else:
        top = (1.0 - fx) * v00 + fx * v01
        bot = (1.0 - fx) * v10 + fx * v11
    out = top if fy == 0.0 else (1.0 - fy) * top + fy * bot
    lo = np.minimum(np.minimum(v00, v01), np.minimum(v10, v11))
    hi = np.maximum(np.maximum(v00, v01), np.maximum(v10, v11))
    return np.clip(out, lo, hi)


def box_from_extreme_points(points: Sequence[Point]) -> Box:
    """Smallest axis-aligned box containing four extreme-click points."""
    if len(points) != 4:
        raise ValueError(f"extreme clicking needs exactly 4 points, got {len(points)}")
    xs = [p.x for p in points]
    ys = [p.y for p in points]
    return Box(min(xs), min(ys), max(xs), max(ys))


def iou(a: Box, b: Box) -> float:
    """Intersection over union of two boxes; two zero-area boxes give 0."""
    iw = min(a.x_max, b.x_max) - max(a.x_min, b.x_min)
    ih = min(a.y_max, b.y_max) - max(a.y_min, b.y_min)
    inter = max(iw, 0.0) * max(ih, 0.0)
    union = a.area + b.area - inter
    if union <= 0.0:
        return 0.0
    return min(inter / union, 1.0)


def box_center(b: Box) -> Point:
    """Midpoint of the box extents."""
    return Point((b.x_min + b.x_max) / 2.0, (b.y_min + b.y_max) / 2.0)
