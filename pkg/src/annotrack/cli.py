"""Command-line entry points: serve the UI backend, build fixtures, run the
headless tracking and evaluation pipeline, and script simulated sessions.

Exit codes: 0 success, 1 runtime/io failure, 2 usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import metrics, store
from .styles import PRESETS, preset
from .track import refresh_track


def _fixture_spec_from_file(path: Path) -> metrics.FixtureSpec:
    doc = json.loads(path.read_text())
    return metrics.FixtureSpec(
        frame_count=int(doc.get("frame_count", 300)),
        grid_height=int(doc.get("grid_height", 64)),
        grid_width=int(doc.get("grid_width", 64)),
        channels=int(doc.get("channels", 16)),
        waypoints=tuple(tuple(int(v) for v in w) for w in doc["waypoints"]),
        box_offsets=tuple(float(v) for v in doc.get("box_offsets", (0.15, 0.15, 0.15, 0.15))),
        delta_min=float(doc.get("delta_min", 1.0)),
        descriptor_scale=float(doc.get("descriptor_scale", 1.0)),
        seed=int(doc.get("seed", 0)),
    )


def write_fixture_spec(spec: metrics.FixtureSpec, path: Path) -> None:
    doc = {
        "frame_count": spec.frame_count,
        "grid_height": spec.grid_height,
        "grid_width": spec.grid_width,
        "channels": spec.channels,
        "waypoints": [list(w) for w in spec.waypoints],
        "box_offsets": list(spec.box_offsets),
        "delta_min": spec.delta_min,
        "descriptor_scale": spec.descriptor_scale,
        "seed": spec.seed,
    }
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _policy_from_file(path: Path) -> metrics.OperatorPolicy:
    doc = json.loads(path.read_text())
    frames = doc.get("annotate_frames")
    return metrics.OperatorPolicy(
        clicks_per_frame=int(doc.get("clicks_per_frame", 1)),
        annotate_frames=None if frames in (None, "all") else tuple(int(f) for f in frames),
        seconds_per_event=float(doc.get("seconds_per_event", 1.0)),
        noise_sigma=float(doc.get("noise_sigma", 0.0)),
    )


def _render_fixture_frames(fixture: metrics.SyntheticFixture, frames_dir: Path, scale: int = 4) -> list[str]:
    """Render simple PNG frames (object cell bright on dark) for the viewport."""
    from PIL import Image
    import numpy as np

    frames_dir.mkdir(parents=True, exist_ok=True)
    h, w = fixture.cache.height, fixture.cache.width
    names = []
    for i, (point, box) in enumerate(fixture.ground_truth):
        img = np.full((h, w), 24, dtype=np.uint8)
        r0 = int(box.y_min * h)
        r1 = max(int(box.y_max * h), r0 + 1)
        c0 = int(box.x_min * w)
        c1 = max(int(box.x_max * w), c0 + 1)
        img[r0:r1, c0:c1] = 96
        img[int(point.y * h), int(point.x * w)] = 255
        name = f"frame_{i:05d}.png"
        Image.fromarray(img).resize((w * scale, h * scale), Image.NEAREST).save(frames_dir / name)
        names.append(name)
    return names


def _cmd_precompute_fixture(args: argparse.Namespace) -> int:
    spec = _fixture_spec_from_file(Path(args.spec))
    fixture = metrics.generate_fixture(spec)
    store.write_cache(fixture.cache, args.out)
    print(f"wrote cache: {args.out} ({fixture.cache.frame_count} frames, "
          f"{fixture.cache.height}x{fixture.cache.width}x{fixture.cache.channels})")
    if args.frames_dir:
        frames_dir = Path(args.frames_dir)
        names = _render_fixture_frames(fixture, frames_dir, scale=args.frame_scale)
        manifest = store.VideoManifest(
            frame_image_paths=tuple(names),
            width=fixture.cache.width * args.frame_scale,
            height=fixture.cache.height * args.frame_scale,
            fps=10.0,
            duration_seconds=spec.frame_count / 10.0,
        )
        manifest_path = args.manifest or str(frames_dir / "manifest.json")
        store.save_manifest(manifest, manifest_path)
        print(f"wrote {len(names)} frames and manifest: {manifest_path}")
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    spec = _fixture_spec_from_file(Path(args.fixture))
    fixture = metrics.generate_fixture(spec)
    style = preset(args.style)
    policy = _policy_from_file(Path(args.policy))
    session = metrics.simulate_operator(fixture, style, policy, seed=args.seed)
    cache_path = args.cache or str(Path(args.fixture).with_suffix(".dtc"))
    if not Path(cache_path).exists():
        store.write_cache(fixture.cache, cache_path)
    session.cache_path = cache_path
    store.save_session(session, args.out)
    print(f"wrote session: {args.out} ({len(session.annotations)} annotations, style {style.name})")
    return 0


def _cmd_track(args: argparse.Namespace) -> int:
    session = store.load_session(args.session)
    if not session.cache_path:
        raise FileNotFoundError(f"session {args.session} has no cache reference")
    cache = store.read_cache(session.cache_path)
    entries = refresh_track(cache, session.annotations)
    lines = ["frame,x,y,x_min,y_min,x_max,y_max,provenance,match_distance"]
    for e in entries:
        lines.append(
            f"{e.frame},{e.point.x!r},{e.point.y!r},{e.box.x_min!r},{e.box.y_min!r},"
            f"{e.box.x_max!r},{e.box.y_max!r},{e.provenance},{e.match_distance!r}"
        )
    Path(args.out).write_text("\n".join(lines) + "\n")
    print(f"wrote track: {args.out} ({len(entries)} frames)")
    return 0


def _cmd_eval(args: argparse.Namespace) -> int:
    truth_session = store.load_session(args.truth)
    pred_session = store.load_session(args.pred)
    cache = None
    cache_path = pred_session.cache_path or truth_session.cache_path
    if cache_path and Path(cache_path).exists():
        cache = store.read_cache(cache_path)
    video = args.video or (Path(cache_path).stem if cache_path else "unknown")
    report = metrics.evaluate(truth_session, pred_session, cache, video=video)
    metrics.emit_report([report], args.report)
    print(
        f"wrote report: {args.report} (style {report.style}, mean IoU {report.mean_iou:.4f}, "
        f"mean discrepancy {report.mean_discrepancy:.4f})"
    )
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .server import SessionHandle, create_app

    cache = store.read_cache(args.cache)
    manifest = store.load_manifest(args.manifest) if args.manifest else None
    session_path = Path(args.session)
    if session_path.exists():
        session = store.load_session(session_path)
    else:
        import time

        session = store.SessionFile(style=preset(args.style), cache_path=args.cache,
                                    manifest_path=args.manifest,
                                    epoch_unix_ms=int(time.time() * 1000))
    handle = SessionHandle(session, cache, manifest)
    app = create_app(handle)

    @app.on_event("shutdown")
    def persist() -> None:
        handle.save(session_path)

    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="annotrack", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("serve", help="run the annotation service")
    p.add_argument("--manifest", default=None, help="video manifest JSON")
    p.add_argument("--cache", required=True, help="descriptor cache file")
    p.add_argument("--style", default="autotrack-boxes-sparklines-smartjump", choices=sorted(PRESETS))
    p.add_argument("--session", required=True, help="session file to resume or create")
    p.add_argument("--port", type=int, default=8799)
    p.add_argument("--host", default="127.0.0.1")
    p.set_defaults(func=_cmd_serve)

    p = sub.add_parser("precompute-fixture", help="generate a synthetic cache from a fixture spec")
    p.add_argument("--spec", required=True, help="fixture spec JSON")
    p.add_argument("--out", required=True, help="cache file to write")
    p.add_argument("--frames-dir", default=None, help="also render PNG frames here")
    p.add_argument("--manifest", default=None, help="manifest path (with --frames-dir)")
    p.add_argument("--frame-scale", type=int, default=4)
    p.set_defaults(func=_cmd_precompute_fixture)

    p = sub.add_parser("track", help="headless track refresh for a session")
    p.add_argument("--session", required=True)
    p.add_argument("--out", required=True, help="track CSV to write")
    p.set_defaults(func=_cmd_track)

    p = sub.add_parser("eval", help="compare a session against extreme-click ground truth")
    p.add_argument("--truth", required=True, help="ground-truth session (xclick style)")
    p.add_argument("--pred", required=True, help="predicted session")
    p.add_argument("--report", required=True, help="report table to write")
    p.add_argument("--video", default=None, help="video id for the report row")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("simulate", help="run a scripted operator on a fixture")
    p.add_argument("--fixture", required=True, help="fixture spec JSON")
    p.add_argument("--style", required=True, choices=sorted(PRESETS))
    p.add_argument("--policy", required=True, help="operator policy JSON")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cache", default=None, help="cache path to reference (default: fixture stem .dtc)")
    p.add_argument("--out", required=True, help="session file to write")
    p.set_defaults(func=_cmd_simulate)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
