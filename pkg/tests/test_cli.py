"""End-to-end command-line checks through click's test runner."""

import json

import numpy as np
import pytest
from click.testing import CliRunner

from vw.cli import main
from vw.grid import DepthMap, FloorMask
from vw.pgm import load_depth_map, load_floor_mask, save_depth_map, save_floor_mask


@pytest.fixture
def runner():
    return CliRunner()


def first_json(result):
    for line in result.output.splitlines():
        if line.startswith("{"):
            return json.loads(line)
    raise AssertionError(f"no JSON line in output: {result.output!r}")


def test_score_open_path_all_floor(runner, tmp_path):
    path = tmp_path / "floor.pgm"
    save_floor_mask(path, FloorMask(np.ones((36, 64), dtype=bool)))
    result = runner.invoke(main, ["score-open-path", "--mask", str(path)])
    assert result.exit_code == 0, result.output
    doc = first_json(result)
    assert doc["command"] == [0, 0, 0, 0, 3, 3, 0, 0, 0, 0]
    assert doc["selected_col"] == 3
    assert doc["top_high"] is True


def test_score_open_path_no_floor(runner, tmp_path):
    path = tmp_path / "void.pgm"
    save_floor_mask(path, FloorMask(np.zeros((36, 64), dtype=bool)))
    result = runner.invoke(main, ["score-open-path", "--mask", str(path), "--dump"])
    assert result.exit_code == 0, result.output
    doc = first_json(result)
    assert doc["command"] == [0] * 10
    assert doc["selected_col"] is None


def test_score_depth_all_close(runner, tmp_path):
    path = tmp_path / "close.pgm"
    save_depth_map(path, DepthMap(np.full((36, 64), 0.9)))
    result = runner.invoke(main, ["score-depth", "--depth", str(path)])
    assert result.exit_code == 0, result.output
    assert first_json(result)["command"] == [3] * 10


def test_run_trial_writes_record(runner, tmp_path):
    record_path = tmp_path / "trial.jsonl"
    result = runner.invoke(
        main,
        [
            "run-trial",
            "--layout",
            "easy-a",
            "--mode",
            "cane_only",
            "--seed",
            "3",
            "--record",
            str(record_path),
        ],
    )
    assert result.exit_code == 0, result.output
    doc = first_json(result)
    assert doc["layout"] == "easy-a" and doc["mode"] == "cane_only" and doc["seed"] == 3
    assert set(doc) >= {"completed", "completion_time", "hesitation_pct", "cane_contacts", "safety_window"}
    lines = record_path.read_text(encoding="utf-8").strip().split("\n")
    head = json.loads(lines[0])
    assert head["layout"] == "easy-a" and head["seed"] == 3
    sample = json.loads(lines[1])
    assert set(sample) == {"t", "x", "y", "heading", "speed", "cmd"}
    assert len(lines) > 10


def test_run_trial_from_course_file(runner, tmp_path):
    course = tmp_path / "course.json"
    course.write_text(json.dumps({"layout": "easy-b", "name": "from-file"}), encoding="utf-8")
    result = runner.invoke(
        main, ["run-trial", "--layout", str(course), "--mode", "cane_only", "--seed", "0"]
    )
    assert result.exit_code == 0, result.output
    assert first_json(result)["layout"] == "from-file"


def test_run_trial_unknown_layout_fails(runner):
    result = runner.invoke(main, ["run-trial", "--layout", "bogus-z", "--mode", "cane_only"])
    assert result.exit_code != 0


def test_render_writes_fixtures(runner, tmp_path):
    mask_path = tmp_path / "m.pgm"
    depth_path = tmp_path / "d.pgm"
    result = runner.invoke(
        main,
        [
            "render",
            "--layout",
            "easy-a",
            "--size",
            "64x36",
            "--mask-out",
            str(mask_path),
            "--depth-out",
            str(depth_path),
        ],
    )
    assert result.exit_code == 0, result.output
    doc = first_json(result)
    assert 0.0 <= doc["floor_pct"] <= 100.0
    assert len(doc["written"]) == 2
    mask = load_floor_mask(mask_path)
    depth = load_depth_map(depth_path)
    assert mask.bits.shape == (36, 64)
    assert depth.closeness.shape == (36, 64)


def test_run_experiment_full_report(runner, tmp_path):
    out = tmp_path / "results"
    result = runner.invoke(
        main,
        [
            "run-experiment",
            "--seeds",
            "2",
            "--layouts",
            "easy-a",
            "--modes",
            "open_path,depth,cane_only",
            "--out",
            str(out),
            "--render-size",
            "128x72",
        ],
    )
    assert result.exit_code == 0, result.output
    metrics = (out / "metrics.csv").read_text(encoding="utf-8").strip().split("\n")
    assert len(metrics) == 1 + 3 * 2
    assert metrics[0].startswith("layout,mode,seed,")
    assert (out / "report.csv").exists()
    assert (out / "report.txt").exists()
    assert str(out / "metrics.csv") in result.output


def test_run_experiment_single_mode_skips_report(runner, tmp_path):
    out = tmp_path / "partial"
    result = runner.invoke(
        main,
        ["run-experiment", "--seeds", "1", "--layouts", "easy-a", "--modes", "cane_only", "--out", str(out)],
    )
    assert result.exit_code == 0, result.output
    assert (out / "metrics.csv").exists()
    assert not (out / "report.csv").exists()


def test_version(runner):
    result = runner.invoke(main, ["--version"])
    assert result.exit_code == 0
    assert "vw" in result.output
