"""Assisted video annotation: sparse clicks to dense point+box tracks.

Precomputed per-frame descriptor maps stand in for a detection backbone;
annotations are propagated between keyframes by linear interpolation in
descriptor space followed by nearest-neighbour matching, and every point can
be turned into a box by sampling the cached box-prediction maps.
"""

from .geom import Box, GridMap, Point, box_center, box_from_extreme_points, iou, sample_bilinear
from .descriptor import (
    Descriptor,
    box_at,
    descriptor_at,
    interpolate_descriptor,
    nearest_descriptor_location,
)
from .track import (
    Annotation,
    Sparkline,
    TrackEntry,
    compute_sparklines,
    random_jump_target,
    refresh_track,
    smartjump_target,
)
from .styles import PRESETS, AnnotationStyle, preset
from .store import (
    DescriptorCache,
    SessionFile,
    VideoManifest,
    load_manifest,
    load_session,
    read_cache,
    save_manifest,
    save_session,
    write_cache,
)

__all__ = [
    "Annotation",
    "AnnotationStyle",
    "Box",
    "Descriptor",
    "DescriptorCache",
    "GridMap",
    "Point",
    "PRESETS",
    "SessionFile",
    "Sparkline",
    "TrackEntry",
    "VideoManifest",
    "box_at",
    "box_center",
    "box_from_extreme_points",
    "compute_sparklines",
    "descriptor_at",
    "interpolate_descriptor",
    "iou",
    "load_manifest",
    "load_session",
    "nearest_descriptor_location",
    "preset",
    "random_jump_target",
    "read_cache",
    "refresh_track",
    "sample_bilinear",
    "save_manifest",
    "save_session",
    "smartjump_target",
    "write_cache",
]

__version__ = "0.1.0"
