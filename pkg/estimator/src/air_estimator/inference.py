"""Sliding-window inference: a 4 s estimator hopped every half second,
with the median over windows as the recording's estimate. Inputs
shorter than 4 s are repeated until they are long enough."""
from __future__ import annotations

import numpy as np
import torch

from .features import SAMPLE_RATE, featurize
from .model import ModelSpec, build_model

WINDOW_S = 4.0
HOP_S = 0.5


def load_checkpoint(path):
    """Returns (model, meta); meta carries the target name and the
    feature-standardization constants the model was trained with."""
    rec = torch.load(path, map_location="cpu", weights_only=True)
    model = build_model(ModelSpec())
    model.load_state_dict(rec["state_dict"])
    model.eval()
    meta = {
        "target": rec.get("target", "t60"),
        "feat_mean": float(rec.get("feat_mean", 0.0)),
        "feat_std": float(rec.get("feat_std", 1.0)),
    }
    return model, meta


def window_starts(n_samples: int, sample_rate: int) -> list:
    win = int(WINDOW_S * sample_rate)
    hop = int(HOP_S * sample_rate)
    return list(range(0, n_samples - win + 1, hop))


def tile_to_window(samples: np.ndarray, sample_rate: int) -> np.ndarray:
    """Repeat a short input whole until it covers at least 4 s."""
    win = int(WINDOW_S * sample_rate)
    if samples.size >= win:
        return samples
    reps = int(np.ceil(win / samples.size))
    return np.tile(samples, reps)


def infer(
    model,
    samples: np.ndarray,
    sample_rate: int,
    feat_mean: float = 0.0,
    feat_std: float = 1.0,
) -> dict:
    """Median of per-window estimates; short inputs are tiled first.

    Returns {"estimate", "n_windows", "silent"}; silence is flagged but
    still estimated (no gating). ``feat_mean``/``feat_std`` must match
    the training-time standardization (see the checkpoint meta).
    """
    if sample_rate != SAMPLE_RATE:
        raise ValueError(f"expected {SAMPLE_RATE} Hz input")
    x = np.asarray(samples, dtype=np.float64)
    silent = not np.any(x)
    x = tile_to_window(x, sample_rate)
    win = int(WINDOW_S * sample_rate)
    estimates = []
    with torch.no_grad():
        for start in window_starts(x.size, sample_rate):
            feats = (featurize(x[start : start + win], sample_rate) - feat_mean) / feat_std
            batch = torch.from_numpy(feats.astype(np.float32))[None, None]
            estimates.append(float(model(batch)))
    return {
        "estimate": float(np.median(estimates)),
        "n_windows": len(estimates),
        "silent": silent,
    }
