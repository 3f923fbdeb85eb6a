"""Persistence: descriptor cache binary format, video manifest, session files.

Cache layout (bit-exact, little-endian):

    bytes 0..3    magic "DTC1"
    bytes 4..23   five u32 fields: version (=1), frame_count, height, width, channels
    then frame_count blocks of height*width*channels float32  (descriptor maps,
        row-major, channel-innermost)
    then frame_count blocks of height*width*4 float32  (box offset maps,
        same layout; channels are left, top, right, bottom)

The whole cache loads eagerly into memory so every per-frame lookup after
open is a pure in-memory operation. Session and manifest files are
schema-versioned JSON.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .geom import GridMap, Point
from .styles import AnnotationStyle
from .track import Annotation

CACHE_MAGIC = b"DTC1"
CACHE_VERSION = 1
_HEADER = struct.Struct("<5I")
# Refuse to allocate for absurd headers before trusting the dimensions.
_MAX_CACHE_BYTES = 1 << 40

SESSION_SCHEMA_VERSION = 1
MANIFEST_SCHEMA_VERSION = 1


class CacheFormatError(ValueError):
    """Bad magic, version, or payload size larger than the dimensions declare."""


class CacheTruncationError(ValueError):
    """File ends before the declared payload does."""


class CacheSchemaError(ValueError):
    """Declared dimensions are unusable (zero or overflowing)."""


class SessionParseError(ValueError):
    """Session or manifest document is structurally malformed."""


class SessionIntegrityError(ValueError):
    """Session document violates an invariant (duplicate frames, time travel)."""


@dataclass(frozen=True, eq=False)
class DescriptorCache:
    """Per-frame descriptor maps and box-prediction maps, memory resident."""

    desc: tuple[GridMap, ...]
    boxes: tuple[GridMap, ...]
    source_id: str = ""

    def __post_init__(self):
        if not self.desc:
            raise ValueError("cache needs at least one frame")
        if len(self.desc) != len(self.boxes):
            raise ValueError("descriptor and box maps must cover the same frames")
        h, w, c = self.desc[0].values.shape
        for m in self.desc:
            if m.values.shape != (h, w, c):
                raise ValueError("all descriptor maps must share one shape")
            if m.values.dtype != np.float32:
                raise ValueError("cache values are single precision (float32)")
        for m in self.boxes:
            if m.values.shape != (h, w, 4):
                raise ValueError("box maps must be H x W x 4 and match the descriptor grid")
            if m.values.dtype != np.float32:
                raise ValueError("cache values are single precision (float32)")

    @property
    def frame_count(self) -> int:
        return len(self.desc)

    @property
    def height(self) -> int:
        return self.desc[0].height

    @property
    def width(self) -> int:
        return self.desc[0].width

    @property
    def channels(self) -> int:
        return self.desc[0].channels


def write_cache(cache: DescriptorCache, path: str | Path) -> None:
    """Serialize a cache to the binary layout above."""
    with open(path, "wb") as f:
        f.write(CACHE_MAGIC)
        f.write(
            _HEADER.pack(
                CACHE_VERSION, cache.frame_count, cache.height, cache.width, cache.channels
            )
        )
        for m in cache.desc:
            f.write(np.ascontiguousarray(m.values, dtype="<f4").tobytes())
        for m in cache.boxes:
            f.write(np.ascontiguousarray(m.values, dtype="<f4").tobytes())


def read_cache(path: str | Path) -> DescriptorCache:
    """Load a cache file eagerly; every float payload byte is preserved."""
    data = Path(path).read_bytes()
    header_size = len(CACHE_MAGIC) + _HEADER.size
    if len(data) < header_size:
        raise CacheTruncationError(f"file is {len(data)} bytes, shorter than the {header_size}-byte header")
    if data[:4] != CACHE_MAGIC:
        raise CacheFormatError(f"bad magic {data[:4]!r}, expected {CACHE_MAGIC!r}")
    version, frames, height, width, channels = _HEADER.unpack_from(data, 4)
    if version != CACHE_VERSION:
        raise CacheFormatError(f"unsupported cache version {version}")
    if min(frames, height, width, channels) == 0:
        raise CacheSchemaError(f"zero dimension in header: {frames}x{height}x{width}x{channels}")
    desc_floats = frames * height * width * channels
    box_floats = frames * height * width * 4
    expected = 4 * (desc_floats + box_floats)
    if expected > _MAX_CACHE_BYTES:
        raise CacheSchemaError(f"declared payload of {expected} bytes overflows the supported cache size")
    actual = len(data) - header_size
    if actual < expected:
        raise CacheTruncationError(f"payload truncated: expected {expected} bytes, found {actual}")
    if actual > expected:
        raise CacheFormatError(f"payload size mismatch: expected {expected} bytes, found {actual}")
    desc = np.frombuffer(data, dtype="<f4", count=desc_floats, offset=header_size)
    boxes = np.frombuffer(data, dtype="<f4", count=box_floats, offset=header_size + 4 * desc_floats)
    desc = desc.reshape(frames, height, width, channels)
    boxes = boxes.reshape(frames, height, width, 4)
    return DescriptorCache(
        desc=tuple(GridMap(desc[i]) for i in range(frames)),
        boxes=tuple(GridMap(boxes[i]) for i in range(frames)),
        source_id=str(path),
    )


@dataclass(frozen=True)
class VideoManifest:
    """Ordered frame images plus the fields needed to sanity-check a video."""

    frame_image_paths: tuple[str, ...]
    width: int
    height: int
    fps: float
    duration_seconds: float

    def __post_init__(self):
        if not self.frame_image_paths:
            raise ValueError("manifest needs at least one frame image")
        expected = self.fps * self.duration_seconds
        if abs(expected - len(self.frame_image_paths)) > 1.0:
            raise ValueError(
                f"duration check failed: fps*duration = {expected:.2f} but {len(self.frame_image_paths)} frames listed"
            )

    @property
    def frame_count(self) -> int:
        return len(self.frame_image_paths)


def save_manifest(manifest: VideoManifest, path: str | Path) -> None:
    doc = {
        "schema_version": MANIFEST_SCHEMA_VERSION,
        "width": manifest.width,
        "height": manifest.height,
        "fps": manifest.fps,
        "duration_seconds": manifest.duration_seconds,
        "frame_count": manifest.frame_count,
        "frames": list(manifest.frame_image_paths),
    }
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def load_manifest(path: str | Path) -> VideoManifest:
    """Load a manifest; frame paths resolve relative to the manifest file."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
        declared = int(doc["frame_count"])
        frames = [str(path.parent / p) for p in doc["frames"]]
        manifest = VideoManifest(
            frame_image_paths=tuple(frames),
            width=int(doc["width"]),
            height=int(doc["height"]),
            fps=float(doc["fps"]),
            duration_seconds=float(doc["duration_seconds"]),
        )
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise SessionParseError(f"malformed manifest {path}: {exc}") from exc
    if declared != manifest.frame_count:
        raise SessionParseError(
            f"manifest frame_count {declared} disagrees with {manifest.frame_count} listed frames"
        )
    missing = [p for p in manifest.frame_image_paths if not Path(p).exists()]
    if missing:
        raise SessionIntegrityError(f"{len(missing)} manifest frame images missing, first: {missing[0]}")
    return manifest


@dataclass(frozen=True)
class SessionEvent:
    """One timestamped entry of the annotation event log."""

    t_ms: float
    kind: str  # frame_shown | click | clear | refresh | jump | discard_partial
    data: dict = field(default_factory=dict)


@dataclass
class SessionFile:
    """Annotation session state: style, annotations, event log, references."""

    style: AnnotationStyle
    annotations: list[Annotation] = field(default_factory=list)
    event_log: list[SessionEvent] = field(default_factory=list)
    manifest_path: str | None = None
    cache_path: str | None = None
    seed: int = 0
    epoch_unix_ms: int = 0
    extras: dict[str, Any] = field(default_factory=dict)

    def annotated_frames(self) -> set[int]:
        return {a.frame for a in self.annotations}


_KNOWN_SESSION_KEYS = {
    "schema_version",
    "style",
    "annotations",
    "event_log",
    "manifest_path",
    "cache_path",
    "seed",
    "epoch_unix_ms",
}


def _annotation_to_doc(a: Annotation) -> dict:
    return {
        "frame": a.frame,
        "x": a.point.x,
        "y": a.point.y,
        "source": a.source,
        "timestamp_ms": a.timestamp_ms,
        "extreme_points": None
        if a.extreme_points is None
        else [[p.x, p.y] for p in a.extreme_points],
    }


def _annotation_from_doc(doc: dict) -> Annotation:
    ext = doc.get("extreme_points")
    return Annotation(
        frame=int(doc["frame"]),
        point=Point(float(doc["x"]), float(doc["y"])),
        source=str(doc["source"]),
        timestamp_ms=float(doc["timestamp_ms"]),
        extreme_points=None if ext is None else tuple(Point(float(x), float(y)) for x, y in ext),
    )


def style_to_doc(s: AnnotationStyle) -> dict:
    return {
        "name": s.name,
        "timeline": s.timeline,
        "autotrack": s.autotrack,
        "show_boxes_on_annotations": s.show_boxes_on_annotations,
        "sparklines": s.sparklines,
        "smartjump": s.smartjump,
        "presentation": s.presentation,
        "click_mode": s.click_mode,
    }


def save_session(session: SessionFile, path: str | Path) -> None:
    """Write a session as deterministic JSON (stable key order and floats)."""
    doc: dict[str, Any] = {
        "schema_version": SESSION_SCHEMA_VERSION,
        "style": style_to_doc(session.style),
        "annotations": [_annotation_to_doc(a) for a in session.annotations],
        "event_log": [{"t_ms": e.t_ms, "kind": e.kind, "data": e.data} for e in session.event_log],
        "manifest_path": session.manifest_path,
        "cache_path": session.cache_path,
        "seed": session.seed,
        "epoch_unix_ms": session.epoch_unix_ms,
    }
    doc.update(session.extras)
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def load_session(path: str | Path) -> SessionFile:
    try:
        doc = json.loads(Path(path).read_text())
        version = int(doc["schema_version"])
        if version > SESSION_SCHEMA_VERSION:
            raise SessionParseError(f"session schema version {version} is newer than supported")
        style = AnnotationStyle(**doc["style"])
        annotations = [_annotation_from_doc(a) for a in doc["annotations"]]
        events = [
            SessionEvent(float(e["t_ms"]), str(e["kind"]), dict(e.get("data", {})))
            for e in doc["event_log"]
        ]
        extras = {k: v for k, v in doc.items() if k not in _KNOWN_SESSION_KEYS}
        session = SessionFile(
            style=style,
            annotations=annotations,
            event_log=events,
            manifest_path=doc.get("manifest_path"),
            cache_path=doc.get("cache_path"),
            seed=int(doc.get("seed", 0)),
            epoch_unix_ms=int(doc.get("epoch_unix_ms", 0)),
            extras=extras,
        )
    except SessionParseError:
        raise
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise SessionParseError(f"malformed session {path}: {exc}") from exc

    seen: set[int] = set()
    for a in session.annotations:
        if a.frame in seen:
            raise SessionIntegrityError(f"two annotations for frame {a.frame}")
        seen.add(a.frame)
    for prev, cur in zip(session.event_log, session.event_log[1:]):
        if cur.t_ms < prev.t_ms:
            raise SessionIntegrityError(
                f"event log timestamps decrease: {prev.t_ms} then {cur.t_ms}"
            )
    return session
