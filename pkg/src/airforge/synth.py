"""Synthetic test material: model AIRs, speech surrogates, and noise.

The AIR generator realizes the two-stage late-field model directly: a
single Gaussian noise stream shaped by an exponentially decaying
envelope gated at the late-field onset, with an ungated additive noise
floor, plus a deterministic direct-path spike. It is the workhorse for
the self-contained dataset mode and for every generate-and-refit oracle.
"""
from __future__ import annotations

import numpy as np
from scipy import signal as sps

from .air import Air
from .rng import gaussian, generator

T60_LN = float(np.log(1000.0))


def synthetic_air(
    sample_rate: int = 16000,
    duration: float = 1.0,
    t60: float = 0.5,
    noise_floor_db: float = -60.0,
    direct_offset: float = 0.005,
    direct_factor: float = 10.0,
    level: float = 1.0,
    seed: int = 0,
) -> Air:
    """A model AIR: direct spike + decaying Gaussian late field + floor.

    Parameters
    ----------
    t60 : float
        Reverberation time in seconds; the decay rate is t60 / ln(1000).
    noise_floor_db : float
        Additive floor amplitude in dB relative to the late-field level.
    direct_offset : float
        Direct-path arrival time in seconds.
    direct_factor : float
        Direct spike amplitude as a multiple of the late-field maximum.
    """
    n = int(round(duration * sample_rate))
    tau = t60 / T60_LN
    sigma = level * 10.0 ** (noise_floor_db / 20.0)
    direct = int(round(direct_offset * sample_rate))
    onset = direct + int(round(0.0025 * sample_rate))

    t = np.arange(n) / sample_rate
    envelope = np.zeros(n)
    late = t >= onset / sample_rate
    envelope[late] = level * np.exp(-(t[late] - onset / sample_rate) / tau)

    # Decay excitation and stationary floor are independent draws; the
    # floor stays active over the whole record.
    rng = generator(seed)
    h = gaussian(rng, n) * envelope + sigma * gaussian(rng, n)
    h[direct] = direct_factor * np.max(np.abs(h[onset:])) if onset < n else direct_factor
    return Air(h, sample_rate)


def speech_surrogate(
    duration: float,
    sample_rate: int = 16000,
    seed: int = 0,
    burst_range: tuple = (0.15, 0.5),
    gap_range: tuple = (0.08, 0.35),
) -> Air:
    """Colored-noise stand-in for speech: lowpassed noise in bursts.

    The on/off envelope gives activity detectors something to latch onto
    and leaves gaps where reverberant tails are observable.
    """
    n = int(round(duration * sample_rate))
    rng = generator(seed)
    noise = gaussian(rng, n)
    sos = sps.butter(2, 2000.0, btype="low", fs=sample_rate, output="sos")
    colored = sps.sosfilt(sos, noise)

    mask = np.zeros(n)
    pos = 0
    while pos < n:
        burst = int(rng.uniform(*burst_range) * sample_rate)
        gap = int(rng.uniform(*gap_range) * sample_rate)
        mask[pos : pos + burst] = 1.0
        pos += burst + gap
    ramp = int(0.01 * sample_rate)
    if ramp > 1:
        kernel = np.hanning(2 * ramp + 1)
        mask = np.convolve(mask, kernel / kernel.sum(), mode="same")
    return Air(colored * mask, sample_rate)


def white_noise(duration: float, sample_rate: int = 16000, seed: int = 0) -> Air:
    """Unit-variance Gaussian noise."""
    n = int(round(duration * sample_rate))
    return Air(gaussian(generator(seed), n), sample_rate)
