"""Track propagation: sparse annotations to a full per-frame label track.

A refresh turns the current annotation set into one (point, box) entry per
frame. Annotated frames keep their points exactly; frames between two
annotations get descriptor-space interpolation followed by nearest-neighbour
matching; frames outside the annotated span hold the nearest annotated
descriptor constant and match per frame.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, Sequence

from .descriptor import descriptor_at, box_at, interpolate_descriptor, nearest_descriptor_location
from .geom import Box, Point, box_center, box_from_extreme_points

if TYPE_CHECKING:
    from .store import DescriptorCache

ANNOTATION_SOURCES = ("click", "xclick")


@dataclass(frozen=True)
class Annotation:
    """A label produced by direct human input on one frame."""

    frame: int
    point: Point
    source: str  # "click" | "xclick"
    timestamp_ms: float
    extreme_points: tuple[Point, ...] | None = None

    def __post_init__(self):
        if self.source not in ANNOTATION_SOURCES:
            raise ValueError(f"unknown annotation source {self.source!r}")
        if self.source == "xclick":
            if self.extreme_points is None or len(self.extreme_points) != 4:
                raise ValueError("xclick annotations carry exactly 4 extreme points")
        elif self.extreme_points is not None:
            raise ValueError("extreme points are only valid for xclick annotations")

    @classmethod
    def from_extreme_clicks(
        cls, frame: int, clicks: Sequence[Point], timestamp_ms: float
    ) -> "Annotation":
        """Build an xclick annotation; its track point is the box center."""
        box = box_from_extreme_points(clicks)
        return cls(frame, box_center(box), "xclick", timestamp_ms, tuple(clicks))

    def box(self) -> Box | None:
        """The annotated box for xclick annotations, None otherwise."""
        if self.extreme_points is None:
            return None
        return box_from_extreme_points(self.extreme_points)


@dataclass(frozen=True)
class TrackEntry:
    """One frame of a label track."""

    frame: int
    point: Point
    box: Box
    provenance: str  # "annotated" | "predicted"
    match_distance: float  # 0.0 for annotated entries


@dataclass(frozen=True)
class Sparkline:
    """Frame-to-frame change series for a track; entry 0 of each series is 0."""

    location_delta: tuple[float, ...]
    area_delta: tuple[float, ...]


def refresh_track(cache: "DescriptorCache", annotations: Sequence[Annotation]) -> list[TrackEntry]:
    """Extend a sparse annotation set to one track entry per cache frame.

    Every entry's box is sampled from the frame's box-prediction map at the
    entry's point, including annotated frames.
    """
    if not annotations:
        raise ValueError("refresh requires at least one annotation")
    anns = sorted(annotations, key=lambda a: a.frame)
    for a, b in zip(anns, anns[1:]):
        if a.frame == b.frame:
            raise ValueError(f"more than one annotation for frame {a.frame}")
    n = cache.frame_count
    if anns[0].frame < 0 or anns[-1].frame >= n:
        raise ValueError(
            f"annotation frames [{anns[0].frame}, {anns[-1].frame}] outside cache range [0, {n - 1}]"
        )

    anchors = [(a.frame, descriptor_at(cache.desc[a.frame], a.point)) for a in anns]
    entries: list[TrackEntry | None] = [None] * n

    for a in anns:
        box = box_at(cache.boxes[a.frame], a.point)
        entries[a.frame] = TrackEntry(a.frame, a.point, box, "annotated", 0.0)

    def predict(frame: int, target) -> None:
        point, dist = nearest_descriptor_location(cache.desc[frame], target)
        box = box_at(cache.boxes[frame], point)
        entries[frame] = TrackEntry(frame, point, box, "predicted", dist)

    first_frame, first_desc = anchors[0]
    for f in range(first_frame):
        predict(f, first_desc)
    last_frame, last_desc = anchors[-1]
    for f in range(last_frame + 1, n):
        predict(f, last_desc)
    for (t, d_t), (tp, d_tp) in zip(anchors, anchors[1:]):
        for f in range(t + 1, tp):
            predict(f, interpolate_descriptor(d_t, d_tp, t, tp, f))

    return entries  # type: ignore[return-value]


def compute_sparklines(track: Sequence[TrackEntry]) -> Sparkline:
    """Per-frame location distance and absolute box-area change vs the previous frame."""
    if not track:
        raise ValueError("cannot compute sparklines for an empty track")
    loc = [0.0]
    area = [0.0]
    for prev, cur in zip(track, track[1:]):
        loc.append(prev.point.distance_to(cur.point))
        area.append(abs(cur.box.area - prev.box.area))
    return Sparkline(tuple(loc), tuple(area))


def smartjump_target(track: Sequence[TrackEntry], annotated_frames: Iterable[int]) -> int | None:
    """Unannotated frame where the track shifts the most.

    Ties resolve to the smallest frame index; None when every frame is
    annotated.
    """
    annotated = set(annotated_frames)
    deltas = compute_sparklines(track).location_delta
    best = None
    best_delta = float("-inf")
    for entry, delta in zip(track, deltas):
        if entry.frame in annotated:
            continue
        if delta > best_delta:
            best = entry.frame
            best_delta = delta
    return best


def random_jump_target(frame_count: int, annotated_frames: Iterable[int], rng_seed: int) -> int | None:
    """Uniformly random unannotated frame from a seeded generator; None if all annotated."""
    if frame_count < 1:
        raise ValueError("frame_count must be at least 1")
    annotated = set(annotated_frames)
    candidates = [f for f in range(frame_count) if f not in annotated]
    if not candidates:
        return None
    return random.Random(rng_seed).choice(candidates)
