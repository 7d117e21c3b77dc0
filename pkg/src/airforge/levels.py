"""Level and loudness measurement: active speech level, RMS, LUFS.

The active speech level follows the P.56 Method-B construction: a
double-exponential envelope of |x|, activity counting against a ladder
of thresholds with a 0.2 s hangover, and the level read where the gap
between active level and threshold equals the 15.9 dB margin. Loudness
is the K-weighted, block-gated integrated measure used for broadcast
normalization, computed at the signal's native rate.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import signal as sps
from scipy.ndimage import maximum_filter1d

from .air import Air
from .errors import DegenerateInputError, SilenceError

P56_MARGIN_DB = 15.9
P56_HANGOVER_S = 0.2
P56_TIME_CONSTANT_S = 0.03
_P56_GRID_DB = np.arange(0.0, -100.25, -0.25)

LUFS_BLOCK_S = 0.400
LUFS_OVERLAP = 0.75
LUFS_ABS_GATE = -70.0
LUFS_REL_GATE = -10.0
_LUFS_OFFSET = -0.691


@dataclass(frozen=True)
class LevelReport:
    """A measured level in dB and the method that produced it."""

    value: float
    method: str  # p56_active | rms | lufs_integrated
    silent: bool = False


def rms_level(signal: Air) -> LevelReport:
    """20 log10 of the root mean square, re full scale."""
    if len(signal) == 0:
        raise DegenerateInputError("empty signal")
    mean_sq = float(np.mean(signal.samples**2))
    if mean_sq == 0.0:
        return LevelReport(value=-np.inf, method="rms", silent=True)
    return LevelReport(value=10.0 * np.log10(mean_sq), method="rms")


def _p56_envelope(x: np.ndarray, sample_rate: int) -> np.ndarray:
    g = np.exp(-1.0 / (P56_TIME_CONSTANT_S * sample_rate))
    b, a = [1.0 - g], [1.0, -g]
    p = sps.lfilter(b, a, np.abs(x))
    return sps.lfilter(b, a, p)


def active_speech_level(signal: Air) -> LevelReport:
    """Active speech level in dBov per the Method-B construction."""
    if signal.duration < 1.0:
        raise DegenerateInputError("active speech level needs at least 1 s of signal")
    x = signal.samples
    total_sq = float(np.sum(x**2))
    if total_sq == 0.0:
        raise SilenceError("all-zero signal has no active speech")

    env = _p56_envelope(x, signal.sample_rate)
    hang = int(round(P56_HANGOVER_S * signal.sample_rate))
    # A sample is active for threshold c if the envelope met c within the
    # last `hang` samples; a causal rolling max encodes the hangover.
    held = maximum_filter1d(env, size=hang + 1, mode="constant", cval=0.0,
                            origin=-(hang // 2))
    held_sorted = np.sort(held)

    thresholds = 10.0 ** (_P56_GRID_DB / 20.0)
    active = held_sorted.size - np.searchsorted(held_sorted, thresholds, side="left")
    valid = active > 0
    if not valid.any():
        raise SilenceError("no activity found at any threshold")
    active_db = 10.0 * np.log10(total_sq / active[valid])
    margin = active_db - _P56_GRID_DB[valid]

    above = margin >= P56_MARGIN_DB
    if not above.any():
        raise SilenceError("activity margin never reaches 15.9 dB")
    j = int(np.nonzero(above)[0][-1])  # loudest threshold still above margin
    if j + 1 >= margin.size:
        value = float(active_db[j])
    else:
        frac = (P56_MARGIN_DB - margin[j + 1]) / (margin[j] - margin[j + 1])
        value = float(active_db[j + 1] + frac * (active_db[j] - active_db[j + 1]))
    return LevelReport(value=value, method="p56_active")


def _k_weighting_sos(sample_rate: int) -> np.ndarray:
    """Two-stage K-weighting (shelf + highpass) redesigned at any rate."""
    # Stage 1: high-frequency shelf.
    f0, gain_db, q = 1681.9744509555319, 3.99984385397, 0.7071752369554193
    k = np.tan(np.pi * f0 / sample_rate)
    vh = 10.0 ** (gain_db / 20.0)
    vb = vh**0.499666774155
    a0 = 1.0 + k / q + k * k
    shelf = [
        (vh + vb * k / q + k * k) / a0,
        2.0 * (k * k - vh) / a0,
        (vh - vb * k / q + k * k) / a0,
        1.0,
        2.0 * (k * k - 1.0) / a0,
        (1.0 - k / q + k * k) / a0,
    ]
    # Stage 2: highpass.
    f0, q = 38.13547087613982, 0.5003270373253953
    k = np.tan(np.pi * f0 / sample_rate)
    a0 = 1.0 + k / q + k * k
    highpass = [1.0, -2.0, 1.0, 1.0, 2.0 * (k * k - 1.0) / a0, (1.0 - k / q + k * k) / a0]
    return np.array([shelf, highpass])


def _block_powers(signal: Air) -> np.ndarray:
    """Mean square of K-weighted 400 ms blocks at 75% overlap."""
    x = sps.sosfilt(_k_weighting_sos(signal.sample_rate), signal.samples)
    block = int(round(LUFS_BLOCK_S * signal.sample_rate))
    hop = int(round(block * (1.0 - LUFS_OVERLAP)))
    if x.size < block:
        raise DegenerateInputError("signal shorter than one loudness block")
    n_blocks = 1 + (x.size - block) // hop
    idx = np.arange(block)[None, :] + hop * np.arange(n_blocks)[:, None]
    return np.mean(x[idx] ** 2, axis=1)


def integrated_loudness(signal: Air) -> float:
    """Gated integrated loudness in LUFS (mono channel, weight 1.0)."""
    z = _block_powers(signal)
    loud = _LUFS_OFFSET + 10.0 * np.log10(np.maximum(z, 1e-300))
    abs_gated = z[loud > LUFS_ABS_GATE]
    if abs_gated.size == 0:
        raise SilenceError("no blocks above the absolute loudness gate")
    rel_threshold = _LUFS_OFFSET + 10.0 * np.log10(np.mean(abs_gated)) + LUFS_REL_GATE
    gated = z[(loud > LUFS_ABS_GATE) & (loud > rel_threshold)]
    if gated.size == 0:
        raise SilenceError("no blocks above the relative loudness gate")
    return float(_LUFS_OFFSET + 10.0 * np.log10(np.mean(gated)))


def lufs_level(signal: Air) -> LevelReport:
    return LevelReport(value=integrated_loudness(signal), method="lufs_integrated")


def normalize_loudness(signal: Air, target: float, tolerance: float = 0.05) -> Air:
    """Scale by one gain so integrated loudness hits ``target`` LUFS.

    Rescaling moves blocks across the absolute gate, so the gain is
    refined until the re-measured loudness is within ``tolerance`` LU.
    """
    gain = 1.0
    for _ in range(10):
        measured = integrated_loudness(signal.with_samples(signal.samples * gain))
        if abs(measured - target) <= tolerance:
            break
        gain *= 10.0 ** ((target - measured) / 20.0)
    return signal.with_samples(signal.samples * gain)
