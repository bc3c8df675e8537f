import json

import numpy as np
import pytest

from moscribe.cli import main
from moscribe.fixtures import (
    raise_lower_hand_motion,
    turn_step_motion,
    walking_motion,
)
from moscribe.motion_io import save_matrix, save_motion
from moscribe.store import loads_annotations


@pytest.fixture()
def motion_dir(tmp_path, skeleton):
    directory = tmp_path / "motions"
    directory.mkdir()
    for i in range(6):
        motion = [
            raise_lower_hand_motion(skeleton, id=f"m{i}"),
            walking_motion(30, id=f"m{i}"),
            turn_step_motion(skeleton, id=f"m{i}"),
        ][i % 3]
        save_motion(directory / f"m{i}.mofg", motion, skeleton)
    return directory


def test_ingest(tmp_path, motion_dir):
    out = tmp_path / "ingested"
    assert main(["ingest", str(motion_dir), str(out)]) == 0
    assert len(list(out.glob("*.mofg"))) == 6


def test_segment_ranges(tmp_path, motion_dir):
    out = tmp_path / "ranges.json"
    assert main(["segment", str(motion_dir), str(out)]) == 0
    ranges = json.loads(out.read_text())
    assert ranges["m1"] == [[0, 10], [10, 20], [20, 30]]


def test_segment_profile_writes_csv_and_figure(tmp_path, motion_dir):
    out = tmp_path / "profile"
    assert (
        main(
            [
                "segment", str(motion_dir), str(out),
                "--profile", "--samples", "50",
                "--durations", "0.1", "0.3", "0.5",
            ]
        )
        == 0
    )
    assert (out / "duration_profile.csv").exists()
    assert (out / "duration_profile.png").exists()
    selected = json.loads((out / "selected_duration.json").read_text())
    assert selected["selected_duration_s"] <= 0.5


def test_describe_assemble_paragraph_augment_split_stats(tmp_path, motion_dir):
    bpmsd = tmp_path / "all.bpmsd.json"
    assert main(["describe", str(motion_dir), str(bpmsd)]) == 0
    annotations = loads_annotations(bpmsd.read_bytes())
    assert len(annotations) == 6

    templated = tmp_path / "templated.json"
    assert main(["assemble", str(bpmsd), str(templated)]) == 0
    data = json.loads(templated.read_text())
    assert all("<SEP>" in v or "<Motionless>" not in v for v in data.values())

    bpmp = tmp_path / "all.bpmp.json"
    assert main(["paragraph", str(bpmsd), str(bpmp), "--variants", "2"]) == 0
    paragraphs = loads_annotations(bpmp.read_bytes())
    assert all(len(v) == 2 for k, v in paragraphs.items() if annotations[k] != [""] * len(annotations[k]))

    augmented = tmp_path / "augmented"
    assert main(["augment", str(motion_dir), str(bpmsd), str(augmented), "--count", "2"]) == 0
    assert (augmented / "augmented.bpmsd.json").exists()

    ids = tmp_path / "ids.txt"
    ids.write_text("".join(f"{k:05d}\n" for k in range(100)))
    split_dir = tmp_path / "splits"
    assert main(["split", str(ids), str(split_dir)]) == 0
    assert len((split_dir / "train.txt").read_text().splitlines()) == 80

    stats_dir = tmp_path / "stats"
    assert main(["stats", "--bpmsd", str(bpmsd), "--bpmp", str(bpmp), str(stats_dir)]) == 0
    assert (stats_dir / "stats.json").exists()
    assert (stats_dir / "word_freq.csv").exists()
    assert (stats_dir / "word_freq.png").exists()


def test_eval_writes_report_and_figure(tmp_path):
    rng = np.random.default_rng(0)
    motion = rng.normal(size=(64, 6))
    save_matrix(tmp_path / "motion.memb", motion)
    save_matrix(tmp_path / "text.memb", motion + 0.01 * rng.normal(size=(64, 6)))
    save_matrix(tmp_path / "ref.memb", rng.normal(size=(64, 6)))
    out = tmp_path / "report"
    assert (
        main(
            [
                "eval",
                "--motion", str(tmp_path / "motion.memb"),
                "--text", str(tmp_path / "text.memb"),
                "--reference", str(tmp_path / "ref.memb"),
                "--repetitions", "3",
                str(out),
            ]
        )
        == 0
    )
    report = json.loads((out / "report.json").read_text())
    assert {"FID", "R-Top1", "R-Top2", "R-Top3", "MM-Dist", "Diversity"} <= set(report)
    table = (out / "report.txt").read_text()
    assert "^{±" in table
    assert (out / "report.png").exists()


def test_edit_command(tmp_path):
    from moscribe.fixtures import demo_workspace

    workspace = demo_workspace(tmp_path / "ws")
    out = tmp_path / "edited"
    assert (
        main(
            [
                "edit",
                "--coarse", "a person raises the right hand and lowers it",
                "--set", "0=Move forward.",
                "--set", "1=Move forward.",
                "--workspace", str(workspace),
                str(out),
            ]
        )
        == 0
    )
    assert (out / "initial.mofg").exists()
    assert (out / "edited.mofg").exists()
    texts = json.loads((out / "texts.json").read_text())
    assert texts["after"] == ["Move forward.", "Move forward."]


def test_pipeline_command(tmp_path, motion_dir):
    out = tmp_path / "dataset"
    assert main(["pipeline", "--input", str(motion_dir), "--output", str(out)]) == 0
    assert (out / "train.bpmsd.json").exists()
