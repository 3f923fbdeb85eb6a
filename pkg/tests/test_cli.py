"""CLI subcommands end to end: fixture -> simulate -> track -> eval."""

import json

import pytest

from annotrack.cli import main, write_fixture_spec
from annotrack.metrics import FixtureSpec, parse_report
from annotrack.store import load_session, read_cache


@pytest.fixture()
def spec_file(tmp_path):
    spec = FixtureSpec(frame_count=20, grid_height=8, grid_width=8, channels=4,
                       waypoints=((0, 0, 0), (19, 7, 7)), seed=11)
    path = tmp_path / "fixture.json"
    write_fixture_spec(spec, path)
    return path


@pytest.fixture()
def policy_file(tmp_path):
    path = tmp_path / "policy.json"
    path.write_text(json.dumps({"clicks_per_frame": 4, "annotate_frames": "all"}))
    return path


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as exc:
        main(["--definitely-not-a-flag"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["simulate"])  # missing required flags
    assert exc.value.code == 2


def test_missing_file_exit_code(tmp_path, capsys):
    rc = main(["track", "--session", str(tmp_path / "missing.json"), "--out", str(tmp_path / "o.csv")])
    assert rc == 1
    assert "error:" in capsys.readouterr().err


def test_precompute_fixture_writes_cache(spec_file, tmp_path):
    out = tmp_path / "cache.dtc"
    assert main(["precompute-fixture", "--spec", str(spec_file), "--out", str(out)]) == 0
    cache = read_cache(out)
    assert cache.frame_count == 20 and cache.channels == 4


def test_precompute_fixture_with_frames(spec_file, tmp_path):
    out = tmp_path / "cache.dtc"
    frames_dir = tmp_path / "frames"
    rc = main([
        "precompute-fixture", "--spec", str(spec_file), "--out", str(out),
        "--frames-dir", str(frames_dir),
    ])
    assert rc == 0
    pngs = sorted(frames_dir.glob("*.png"))
    assert len(pngs) == 20
    assert pngs[0].read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
    from annotrack.store import load_manifest

    manifest = load_manifest(frames_dir / "manifest.json")
    assert manifest.frame_count == 20


def test_simulate_then_eval_self_comparison(spec_file, policy_file, tmp_path):
    session_path = tmp_path / "truth.json"
    rc = main([
        "simulate", "--fixture", str(spec_file), "--style", "xclick",
        "--policy", str(policy_file), "--seed", "3", "--out", str(session_path),
    ])
    assert rc == 0
    session = load_session(session_path)
    assert len(session.annotations) == 20
    assert session.cache_path and read_cache(session.cache_path).frame_count == 20

    report_path = tmp_path / "report.csv"
    rc = main([
        "eval", "--truth", str(session_path), "--pred", str(session_path),
        "--report", str(report_path),
    ])
    assert rc == 0
    row = parse_report(report_path)[0]
    assert row["mean_iou"] == 1.0
    assert row["mean_discrepancy"] == 0.0
    assert row["accuracy_at_0_7"] == 1.0


def test_track_then_eval_on_linear_fixture(spec_file, policy_file, tmp_path):
    truth_path = tmp_path / "truth.json"
    pred_path = tmp_path / "pred.json"
    keyframe_policy = tmp_path / "kf_policy.json"
    keyframe_policy.write_text(json.dumps({"clicks_per_frame": 1, "annotate_frames": [0, 19]}))
    assert main([
        "simulate", "--fixture", str(spec_file), "--style", "xclick",
        "--policy", str(policy_file), "--seed", "3", "--out", str(truth_path),
    ]) == 0
    assert main([
        "simulate", "--fixture", str(spec_file), "--style", "autotrack",
        "--policy", str(keyframe_policy), "--seed", "4", "--out", str(pred_path),
    ]) == 0

    track_csv = tmp_path / "track.csv"
    assert main(["track", "--session", str(pred_path), "--out", str(track_csv)]) == 0
    lines = track_csv.read_text().splitlines()
    assert lines[0].startswith("frame,x,y,")
    assert len(lines) == 21

    report_path = tmp_path / "report.csv"
    assert main([
        "eval", "--truth", str(truth_path), "--pred", str(pred_path),
        "--report", str(report_path), "--video", "linear",
    ]) == 0
    row = parse_report(report_path)[0]
    # Constant box map along the path: every recovered box is the truth box.
    assert row["accuracy_at_0_7"] == 1.0
    assert row["style"] == "autotrack"
    assert row["video"] == "linear"
    assert row["fraction_annotated"] == pytest.approx(2 / 20)


def test_serve_missing_cache_exits_1(tmp_path, capsys):
    rc = main([
        "serve", "--cache", str(tmp_path / "nope.dtc"),
        "--session", str(tmp_path / "s.json"), "--port", "0",
    ])
    assert rc == 1
    assert "error:" in capsys.readouterr().err
