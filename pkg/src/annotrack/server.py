"""Local annotation service: session state, feature-flag gating, HTTP API.

One SessionHandle owns one session. Mutations are serialized by a lock and
each appends exactly one event-log entry with a non-decreasing timestamp.
Reads never mutate: while a background refresh runs, they serve the last
completed track plus the dirty flag. A WebSocket push channel notifies
clients whenever a refresh completes.
"""

from __future__ import annotations

import asyncio
import random
import threading
import time
from pathlib import Path
from typing import Callable

from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect
from fastapi.responses import Response
from pydantic import BaseModel

from . import track as track_ops
from .geom import Box, Point
from .store import DescriptorCache, SessionFile, VideoManifest, save_session, style_to_doc
from .track import Annotation, TrackEntry

STEP_DELTAS = (-10, -1, 1, 10)
JUMP_KINDS = ("random", "smart", "next_annotated", "prev_annotated", "step", "seek")


class FeatureDisabledError(RuntimeError):
    """The session's style does not enable the requested feature."""


class NoTrackError(RuntimeError):
    """The operation needs a refreshed track and none exists yet."""


def _monotonic_ms() -> float:
    return time.monotonic() * 1000.0


def _point_doc(p: Point) -> dict:
    return {"x": p.x, "y": p.y}


def _box_doc(b: Box) -> dict:
    return {"x_min": b.x_min, "y_min": b.y_min, "x_max": b.x_max, "y_max": b.y_max}


class SessionHandle:
    """Single-writer view over one session, its cache, and its derived track."""

    def __init__(
        self,
        session: SessionFile,
        cache: DescriptorCache,
        manifest: VideoManifest | None = None,
        clock: Callable[[], float] | None = None,
    ):
        if manifest is not None and manifest.frame_count != cache.frame_count:
            raise ValueError(
                f"manifest lists {manifest.frame_count} frames but cache holds {cache.frame_count}"
            )
        self.session = session
        self.cache = cache
        self.manifest = manifest
        self._lock = threading.Lock()
        self._clock = clock or _monotonic_ms
        self._clock_origin: float | None = None
        self.current_frame = 0
        self.dirty_track = bool(session.annotations)
        self.track: list[TrackEntry] | None = None
        self.sparklines = None
        self.pending_xclicks: list[Point] = []
        self._jump_count = sum(1 for e in session.event_log if e.kind == "jump")
        order = list(range(cache.frame_count))
        random.Random(session.seed).shuffle(order)
        # Visiting order for random-order presentation; resumable because it
        # only depends on the session seed.
        self.presentation_order = order

    # -- internals ----------------------------------------------------------

    def _now_ms(self) -> float:
        raw = self._clock()
        if self._clock_origin is None:
            last = self.session.event_log[-1].t_ms if self.session.event_log else 0.0
            self._clock_origin = raw - last
        t = raw - self._clock_origin
        if self.session.event_log:
            t = max(t, self.session.event_log[-1].t_ms)
        return t

    def _log(self, kind: str, data: dict) -> float:
        from .store import SessionEvent

        stamp = self._now_ms()
        self.session.event_log.append(SessionEvent(stamp, kind, data))
        return stamp

    def _check_frame(self, frame: int) -> None:
        if not (0 <= frame < self.cache.frame_count):
            raise IndexError(f"frame {frame} outside [0, {self.cache.frame_count - 1}]")

    def _annotation_at(self, frame: int) -> Annotation | None:
        for a in self.session.annotations:
            if a.frame == frame:
                return a
        return None

    def _replace_annotation(self, ann: Annotation) -> None:
        self.session.annotations = [a for a in self.session.annotations if a.frame != ann.frame]
        self.session.annotations.append(ann)
        self.dirty_track = True

    def _set_current(self, frame: int) -> bool:
        """Move the cursor; partial extreme clicks do not survive navigation.

        Returns True when partial points were discarded, so the caller can
        record it inside its own (single) event-log entry.
        """
        discarded = False
        if frame != self.current_frame and self.pending_xclicks:
            self.pending_xclicks = []
            discarded = True
        self.current_frame = frame
        return discarded

    # -- mutations (each appends exactly one event) --------------------------

    def click(self, frame: int, point: Point) -> dict:
        with self._lock:
            self._check_frame(frame)
            discarded = self._set_current(frame)
            if self.session.style.click_mode == "xclick":
                self.pending_xclicks.append(point)
                stamp = self._log(
                    "click",
                    {"frame": frame, "x": point.x, "y": point.y, "discarded_partial": discarded},
                )
                if len(self.pending_xclicks) == 4:
                    ann = Annotation.from_extreme_clicks(frame, self.pending_xclicks, stamp)
                    self.pending_xclicks = []
                    self._replace_annotation(ann)
            else:
                stamp = self._log(
                    "click",
                    {"frame": frame, "x": point.x, "y": point.y, "discarded_partial": discarded},
                )
                self._replace_annotation(Annotation(frame, point, "click", stamp))
            return self.frame_state(frame)

    def clear(self, frame: int) -> dict:
        with self._lock:
            self._check_frame(frame)
            had = self._annotation_at(frame) is not None or bool(self.pending_xclicks)
            self.session.annotations = [a for a in self.session.annotations if a.frame != frame]
            if frame == self.current_frame:
                self.pending_xclicks = []
            if had:
                self.dirty_track = True
            self._log("clear", {"frame": frame, "removed": had})
            return self.frame_state(frame)

    def refresh(self) -> dict:
        with self._lock:
            if not self.session.style.autotrack:
                raise FeatureDisabledError("autotrack is disabled for this style")
            if not self.session.annotations:
                raise ValueError("refresh requires at least one annotation")
            entries = track_ops.refresh_track(self.cache, self.session.annotations)
            self.track = entries
            self.sparklines = track_ops.compute_sparklines(entries)
            self.dirty_track = False
            self._log("refresh", {"annotations": len(self.session.annotations)})
            return {
                "frame_count": len(entries),
                "dirty": self.dirty_track,
                "track": [
                    {
                        "frame": e.frame,
                        "point": _point_doc(e.point),
                        "box": _box_doc(e.box),
                        "provenance": e.provenance,
                        "match_distance": e.match_distance,
                    }
                    for e in entries
                ],
                "sparklines": {
                    "location_delta": list(self.sparklines.location_delta),
                    "area_delta": list(self.sparklines.area_delta),
                },
            }

    def jump(self, kind: str, delta: int | None = None, frame: int | None = None) -> dict:
        with self._lock:
            style = self.session.style
            if kind not in JUMP_KINDS:
                raise ValueError(f"unknown jump kind {kind!r}")
            n = self.cache.frame_count
            annotated = self.session.annotated_frames()
            target: int | None
            if kind == "step":
                if not style.timeline:
                    raise FeatureDisabledError("timeline navigation is disabled for this style")
                if delta not in STEP_DELTAS:
                    raise ValueError(f"step delta must be one of {STEP_DELTAS}")
                target = min(max(self.current_frame + delta, 0), n - 1)
            elif kind == "seek":
                if not style.timeline:
                    raise FeatureDisabledError("timeline navigation is disabled for this style")
                if frame is None:
                    raise ValueError("seek requires a frame")
                self._check_frame(frame)
                target = frame
            elif kind in ("next_annotated", "prev_annotated"):
                if not style.timeline:
                    raise FeatureDisabledError("timeline navigation is disabled for this style")
                if kind == "next_annotated":
                    later = [f for f in annotated if f > self.current_frame]
                    target = min(later) if later else None
                else:
                    earlier = [f for f in annotated if f < self.current_frame]
                    target = max(earlier) if earlier else None
            elif kind == "smart":
                if not style.smartjump:
                    raise FeatureDisabledError("smartjump is disabled for this style")
                if self.track is None:
                    raise NoTrackError("smartjump needs a refreshed track")
                target = track_ops.smartjump_target(self.track, annotated)
            else:  # random
                if style.presentation == "random_order":
                    target = self._next_in_presentation(annotated)
                else:
                    target = track_ops.random_jump_target(
                        n, annotated, self.session.seed + self._jump_count
                    )
            self._jump_count += 1
            discarded = self._set_current(target) if target is not None else False
            self._log(
                "jump",
                {
                    "kind": kind,
                    "frame": self.current_frame,
                    "moved": target is not None,
                    "discarded_partial": discarded,
                },
            )
            return {"frame": self.current_frame, "moved": target is not None}

    def _next_in_presentation(self, annotated: set[int]) -> int | None:
        order = self.presentation_order
        if self.current_frame in order:
            start = order.index(self.current_frame) + 1
        else:
            start = 0
        for offset in range(len(order)):
            candidate = order[(start + offset) % len(order)]
            if candidate not in annotated:
                return candidate
        return None

    # -- reads (pure) ---------------------------------------------------------

    def frame_state(self, frame: int) -> dict:
        self._check_frame(frame)
        style = self.session.style
        ann = self._annotation_at(frame)
        state: dict = {
            "frame": frame,
            "frame_count": self.cache.frame_count,
            "dirty_track": self.dirty_track,
            "annotation": None,
            "pending_points": [
                _point_doc(p) for p in (self.pending_xclicks if frame == self.current_frame else [])
            ],
            "predicted": None,
        }
        if self.manifest is not None:
            state["image_url"] = f"/frame/{frame}/image"
        if ann is not None:
            state["annotation"] = {
                "point": _point_doc(ann.point),
                "source": ann.source,
                "box": _box_doc(ann.box()) if ann.box() is not None else None,
            }
        entry = self.track[frame] if (style.autotrack and self.track is not None) else None
        if entry is not None and entry.provenance == "predicted":
            state["predicted"] = {
                "point": _point_doc(entry.point),
                "box": _box_doc(entry.box),
                "provenance": entry.provenance,
                "match_distance": entry.match_distance,
            }
        elif ann is not None and style.show_boxes_on_annotations:
            # Predicted box for the annotated point itself (live lookup).
            from .descriptor import box_at

            box = entry.box if entry is not None else box_at(self.cache.boxes[frame], ann.point)
            state["predicted"] = {"point": _point_doc(ann.point), "box": _box_doc(box),
                                  "provenance": "annotated", "match_distance": 0.0}
        return state

    def sparkline_state(self) -> dict:
        if not self.session.style.sparklines:
            raise FeatureDisabledError("sparklines are disabled for this style")
        if self.sparklines is None:
            return {"location_delta": [], "area_delta": [], "dirty_track": self.dirty_track}
        return {
            "location_delta": list(self.sparklines.location_delta),
            "area_delta": list(self.sparklines.area_delta),
            "dirty_track": self.dirty_track,
        }

    def timeline_state(self) -> dict:
        if not self.session.style.timeline:
            raise FeatureDisabledError("the timeline is disabled for this style")
        return {
            "frame_count": self.cache.frame_count,
            "current_frame": self.current_frame,
            "annotated_frames": sorted(self.session.annotated_frames()),
        }

    def session_state(self) -> dict:
        return {
            "style": style_to_doc(self.session.style),
            "frame_count": self.cache.frame_count,
            "current_frame": self.current_frame,
            "annotation_count": len(self.session.annotations),
            "annotated_frames": sorted(self.session.annotated_frames()),
            "dirty_track": self.dirty_track,
            "event_count": len(self.session.event_log),
        }

    def frame_image(self, frame: int) -> bytes:
        self._check_frame(frame)
        if self.manifest is None:
            raise FileNotFoundError("session has no video manifest")
        return Path(self.manifest.frame_image_paths[frame]).read_bytes()

    def save(self, path: str | Path) -> None:
        with self._lock:
            save_session(self.session, path)


class ClickRequest(BaseModel):
    frame: int
    x: float
    y: float


class ClearRequest(BaseModel):
    frame: int


class JumpRequest(BaseModel):
    kind: str
    delta: int | None = None
    frame: int | None = None


def create_app(handle: SessionHandle) -> FastAPI:
    """Bind a session handle to the documented HTTP surface."""
    app = FastAPI(title="annotrack", docs_url=None, redoc_url=None)
    sockets: set[WebSocket] = set()

    async def broadcast(message: dict) -> None:
        for ws in list(sockets):
            try:
                await ws.send_json(message)
            except Exception:
                sockets.discard(ws)

    def http_error(exc: Exception) -> HTTPException:
        if isinstance(exc, FeatureDisabledError):
            return HTTPException(status_code=403, detail=str(exc))
        if isinstance(exc, (IndexError, FileNotFoundError)):
            return HTTPException(status_code=404, detail=str(exc))
        if isinstance(exc, NoTrackError):
            return HTTPException(status_code=409, detail=str(exc))
        if isinstance(exc, ValueError):
            return HTTPException(status_code=422, detail=str(exc))
        raise exc

    @app.get("/session")
    def get_session() -> dict:
        return handle.session_state()

    @app.get("/frame/{frame}")
    def get_frame(frame: int) -> dict:
        try:
            return handle.frame_state(frame)
        except Exception as exc:
            raise http_error(exc)

    @app.get("/frame/{frame}/image")
    def get_frame_image(frame: int) -> Response:
        try:
            return Response(content=handle.frame_image(frame), media_type="image/png")
        except Exception as exc:
            raise http_error(exc)

    @app.post("/click")
    def post_click(req: ClickRequest) -> dict:
        try:
            return handle.click(req.frame, Point(req.x, req.y))
        except Exception as exc:
            raise http_error(exc)

    @app.post("/clear")
    def post_clear(req: ClearRequest) -> dict:
        try:
            return handle.clear(req.frame)
        except Exception as exc:
            raise http_error(exc)

    @app.post("/refresh")
    async def post_refresh(wait: bool = True) -> dict:
        if not handle.session.style.autotrack:
            raise http_error(FeatureDisabledError("autotrack is disabled for this style"))
        if not handle.session.annotations:
            raise http_error(ValueError("refresh requires at least one annotation"))
        if not wait:
            async def run() -> None:
                try:
                    payload = await asyncio.to_thread(handle.refresh)
                except Exception:
                    return
                await broadcast({"type": "refresh_complete", "frame_count": payload["frame_count"]})

            asyncio.create_task(run())
            return {"status": "scheduled"}
        try:
            payload = await asyncio.to_thread(handle.refresh)
        except Exception as exc:
            raise http_error(exc)
        await broadcast({"type": "refresh_complete", "frame_count": payload["frame_count"]})
        return payload

    @app.post("/jump")
    def post_jump(req: JumpRequest) -> dict:
        try:
            return handle.jump(req.kind, delta=req.delta, frame=req.frame)
        except Exception as exc:
            raise http_error(exc)

    @app.get("/sparklines")
    def get_sparklines() -> dict:
        try:
            return handle.sparkline_state()
        except Exception as exc:
            raise http_error(exc)

    @app.get("/timeline")
    def get_timeline() -> dict:
        try:
            return handle.timeline_state()
        except Exception as exc:
            raise http_error(exc)

    @app.websocket("/ws")
    async def ws_events(websocket: WebSocket) -> None:
        await websocket.accept()
        sockets.add(websocket)
        try:
            while True:
                await websocket.receive_text()
        except WebSocketDisconnect:
            pass
        finally:
            sockets.discard(websocket)

    return app
