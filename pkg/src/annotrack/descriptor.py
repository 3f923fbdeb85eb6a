"""Descriptor sampling, interpolation, and nearest-neighbour location recovery.

This is the engine behind track propagation: descriptors sampled at
annotated points are linearly interpolated across the gap between two
annotated frames, and each interpolated descriptor is matched back to a
location by an exhaustive nearest-neighbour scan over the target frame's
descriptor map.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geom import Box, GridMap, InvalidMapError, Point, cell_center, sample_bilinear


@dataclass(frozen=True, eq=False)
class Descriptor:
    """A per-location feature vector sampled from a dense descriptor map."""

    values: np.ndarray  # 1-d float64

    def __post_init__(self):
        v = self.values
        if not isinstance(v, np.ndarray) or v.ndim != 1:
            raise ValueError("descriptor must be a 1-d array")
        if not np.all(np.isfinite(v)):
            raise ValueError("descriptor contains non-finite values")

    def __len__(self) -> int:
        return self.values.shape[0]


def descriptor_at(frame_map: GridMap, p: Point) -> Descriptor:
    """Bilinear sample of a frame's descriptor map at p."""
    return Descriptor(sample_bilinear(frame_map, p))


def interpolate_descriptor(
    d_t: Descriptor, d_tp: Descriptor, t: int, tp: int, tau: int
) -> Descriptor:
    """Linear interpolation in descriptor space between two annotated frames.

    The descriptor for intermediate frame tau, t < tau < tp, is the convex
    blend with weight (tau - t) / (tp - t) on the later descriptor. The
    result is clamped to the per-channel envelope of the endpoints so
    rounding cannot produce values outside it.
    """
    if len(d_t) != len(d_tp):
        raise ValueError(f"descriptor lengths differ: {len(d_t)} vs {len(d_tp)}")
    if not (t < tau < tp):
        raise ValueError(f"frame {tau} not strictly inside ({t}, {tp})")
    w = (tau - t) / (tp - t)
    a = d_t.values.astype(np.float64)
    b = d_tp.values.astype(np.float64)
    out = (1.0 - w) * a + w * b
    return Descriptor(np.clip(out, np.minimum(a, b), np.maximum(a, b)))


def nearest_descriptor_location(frame_map: GridMap, target: Descriptor) -> tuple[Point, float]:
    """Cell center whose descriptor is L2-closest to target, plus the distance.

    The scan is exhaustive over all H x W cell centers; ties resolve to the
    lowest row-major cell index. Distances accumulate channel by channel in
    float64, in channel order, so results are reproducible by a scalar scan.
    """
    if frame_map.height == 0 or frame_map.width == 0 or frame_map.channels == 0:
        raise InvalidMapError("cannot search an empty map")
    t = np.asarray(target.values, dtype=np.float64)
    if t.shape[0] != frame_map.channels:
        raise ValueError(f"descriptor length {t.shape[0]} does not match map channels {frame_map.channels}")
    v = np.asarray(frame_map.values, dtype=np.float64)
    d2 = np.zeros((frame_map.height, frame_map.width), dtype=np.float64)
    for k in range(frame_map.channels):
        diff = v[:, :, k] - t[k]
        d2 += diff * diff
    idx = int(np.argmin(d2))  # first minimum in row-major order
    row, col = divmod(idx, frame_map.width)
    point = cell_center(row, col, frame_map.height, frame_map.width)
    return point, math.sqrt(float(d2[row, col]))


def box_at(box_map: GridMap, p: Point) -> Box:
    """Predicted box for a query point, from a 4-channel offset map.

    Channels are (left, top, right, bottom) distances from the query point.
    Negative sampled offsets clamp to zero; the box clamps to [0, 1]^2 and
    therefore always contains p in its closed extent.
    """
    if box_map.channels != 4:
        raise ValueError(f"box map must have 4 channels (left, top, right, bottom), got {box_map.channels}")
    off = sample_bilinear(box_map, p)
    left = max(float(off[0]), 0.0)
    top = max(float(off[1]), 0.0)
    right = max(float(off[2]), 0.0)
    bottom = max(float(off[3]), 0.0)
    return Box.clamped(p.x - left, p.y - top, p.x + right, p.y + bottom)
