"""Manifest and WAV loading: the only coupling to the dataset pipeline.

The estimator reads the generator's manifest.jsonl plus the WAV files it
references; there is no in-memory coupling to the synthesis code.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.io import wavfile

from .features import featurize


@dataclass(frozen=True)
class Example:
    file: str
    partition: str
    label: float


def read_wav(path) -> tuple:
    rate, data = wavfile.read(str(path))
    if data.ndim > 1:
        data = data[:, 0]
    if data.dtype == np.int16:
        data = data.astype(np.float64) / 32768.0
    else:
        data = data.astype(np.float64)
    return data, int(rate)


def load_manifest(path, target: str) -> list:
    """Rows of (file, partition, label) for the chosen target."""
    if target not in ("t60", "drr"):
        raise ValueError("target must be 't60' or 'drr'")
    key = f"label_{target}"
    rows = []
    with open(path) as fh:
        for line in fh:
            if not line.strip():
                continue
            rec = json.loads(line)
            rows.append(Example(file=rec["file"], partition=rec["partition"],
                                label=float(rec[key])))
    if not rows:
        raise ValueError(f"no rows in manifest {path}")
    return rows


def load_features(manifest_path, rows) -> tuple:
    """Featurize every row's audio once; returns (X, y) float32 arrays."""
    root = Path(manifest_path).parent
    feats, labels = [], []
    for row in rows:
        samples, rate = read_wav(root / row.file)
        feats.append(featurize(samples, rate).astype(np.float32))
        labels.append(row.label)
    return np.stack(feats), np.asarray(labels, dtype=np.float32)
