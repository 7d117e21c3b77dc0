import json
import subprocess
import sys

import pytest

FS = 16000

MANIFEST_CONFIG = {
    "sample_rate": FS,
    "master_seed": 808,
    "speech": {"mode": "synthetic", "speakers": 5, "files_per_speaker": 1,
               "file_seconds": 16.0},
    "noise": {"mode": "synthetic", "files": 3, "file_seconds": 16.0},
    "airs": {"mode": "synthetic", "count": 4, "t60_range": [0.3, 0.8]},
    "augmentations_per_air": 40,
    "mixes_per_segment": 50,
    "t60_range": [0.2, 1.2],
    "drr_range": [-6.0, 18.0],
    "snr_range": [5.0, 20.0],
    "partitions": {"train": 0.6, "val": 0.2, "test": 0.2},
}


@pytest.fixture(scope="session")
def manifest_path(tmp_path_factory):
    """A 500-row synthetic dataset built through the generator CLI.

    The estimator consumes only this manifest and the WAV files it
    references; building it through the external interface keeps the
    package boundary honest.
    """
    out = tmp_path_factory.mktemp("dataset")
    cfg = out / "config.json"
    cfg.write_text(json.dumps(MANIFEST_CONFIG))
    subprocess.run(
        ["air-forge", "gen-dataset", "--config", str(cfg), "--out", str(out)],
        check=True,
        capture_output=True,
        text=True,
    )
    path = out / "manifest.jsonl"
    assert path.exists()
    return path
