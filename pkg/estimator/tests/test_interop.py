"""End-to-end interface check: train.py -> infer.py batch CSV -> the
dataset tool's eval subcommand."""
import csv
import json
import subprocess
import sys
from pathlib import Path

ESTIMATOR_DIR = Path(__file__).resolve().parents[1]


def test_predictions_csv_scored_by_dataset_tool(manifest_path, tmp_path):
    ckpt_dir = tmp_path / "ckpt"
    train = subprocess.run(
        [sys.executable, str(ESTIMATOR_DIR / "train.py"),
         "--manifest", str(manifest_path), "--target", "t60",
         "--out", str(ckpt_dir), "--epochs", "2", "--seed", "0"],
        capture_output=True, text=True,
    )
    assert train.returncode == 0, train.stderr
    ckpt = ckpt_dir / "t60_model.pt"
    assert ckpt.exists()

    pred_csv = tmp_path / "pred.csv"
    batch = subprocess.run(
        [sys.executable, str(ESTIMATOR_DIR / "infer.py"), "--ckpt", str(ckpt),
         "--manifest", str(manifest_path), "--partition", "test",
         "--out", str(pred_csv)],
        capture_output=True, text=True,
    )
    assert batch.returncode == 0, batch.stderr
    with open(pred_csv, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert rows and set(rows[0]) == {"file", "estimate"}

    scored = subprocess.run(
        ["air-forge", "eval", "--pred", str(pred_csv),
         "--labels", str(manifest_path), "--param", "t60", "--format", "json"],
        capture_output=True, text=True,
    )
    assert scored.returncode == 0, scored.stderr
    stats = json.loads(scored.stdout)
    assert stats["n"] == len(rows)
    assert "mse" in stats and "pearson" in stats


def test_single_file_json_output(manifest_path, tmp_path):
    ckpt_dir = tmp_path / "ckpt"
    subprocess.run(
        [sys.executable, str(ESTIMATOR_DIR / "train.py"),
         "--manifest", str(manifest_path), "--target", "t60",
         "--out", str(ckpt_dir), "--epochs", "1", "--seed", "0"],
        check=True, capture_output=True, text=True,
    )
    row_file = None
    with open(manifest_path) as fh:
        row_file = json.loads(fh.readline())["file"]
    wav = manifest_path.parent / row_file
    out = subprocess.run(
        [sys.executable, str(ESTIMATOR_DIR / "infer.py"),
         "--ckpt", str(ckpt_dir / "t60_model.pt"), "--in", str(wav), "--json"],
        capture_output=True, text=True,
    )
    assert out.returncode == 0, out.stderr
    rec = json.loads(out.stdout)
    assert rec["target"] == "t60"
    assert rec["n_windows"] == 1  # 4 s mixtures -> one window
