"""Decibel-scaled Mel-spectrogram front end.

A 4 s, 16 kHz input with a 256-sample Hann window and 128-sample hop
(no center padding) yields exactly 32 Mel bands x 499 frames. Mel
triangles use the Slaney scale with area normalization over 0-8 kHz;
the dB grid is referenced to its maximum and floored 80 dB below it.
"""
from __future__ import annotations

import numpy as np
from scipy.signal import get_window

SAMPLE_RATE = 16000
N_FFT = 256
HOP = 128
N_MELS = 32
FMIN = 0.0
FMAX = 8000.0
TOP_DB = 80.0
_AMIN = 1e-10


class FeatureError(ValueError):
    pass


def _hz_to_mel(f):
    f = np.asarray(f, dtype=np.float64)
    mel = f / (200.0 / 3.0)
    log_region = f >= 1000.0
    mel = np.where(
        log_region,
        15.0 + np.log(np.maximum(f, 1e-12) / 1000.0) / (np.log(6.4) / 27.0),
        mel,
    )
    return mel


def _mel_to_hz(mel):
    mel = np.asarray(mel, dtype=np.float64)
    hz = mel * (200.0 / 3.0)
    log_region = mel >= 15.0
    return np.where(log_region, 1000.0 * np.exp((mel - 15.0) * np.log(6.4) / 27.0), hz)


def mel_filterbank(sample_rate: int = SAMPLE_RATE) -> np.ndarray:
    """(N_MELS, N_FFT//2 + 1) triangular weights, area-normalized."""
    mel_edges = np.linspace(_hz_to_mel(FMIN), _hz_to_mel(FMAX), N_MELS + 2)
    hz_edges = _mel_to_hz(mel_edges)
    fft_freqs = np.arange(N_FFT // 2 + 1) * sample_rate / N_FFT
    weights = np.zeros((N_MELS, fft_freqs.size))
    for m in range(N_MELS):
        lo, center, hi = hz_edges[m], hz_edges[m + 1], hz_edges[m + 2]
        up = (fft_freqs - lo) / max(center - lo, 1e-12)
        down = (hi - fft_freqs) / max(hi - center, 1e-12)
        weights[m] = np.maximum(0.0, np.minimum(up, down))
        weights[m] *= 2.0 / (hi - lo)  # area norm
    return weights


def featurize(samples: np.ndarray, sample_rate: int) -> np.ndarray:
    """Mel grid in dB, shape (32, n_frames); (32, 499) for 4 s at 16 kHz."""
    if sample_rate != SAMPLE_RATE:
        raise FeatureError(
            f"expected {SAMPLE_RATE} Hz input, got {sample_rate}; "
            "the dataset pipeline fixes the rate upstream"
        )
    x = np.asarray(samples, dtype=np.float64)
    if x.size < N_FFT:
        raise FeatureError("input shorter than one analysis window")
    window = get_window("hann", N_FFT, fftbins=True)
    n_frames = 1 + (x.size - N_FFT) // HOP
    idx = np.arange(N_FFT)[None, :] + HOP * np.arange(n_frames)[:, None]
    spectrum = np.fft.rfft(x[idx] * window, axis=1)
    power = np.abs(spectrum) ** 2
    mel = mel_filterbank(sample_rate) @ power.T
    ref = max(float(mel.max()), _AMIN)
    mel_db = 10.0 * np.log10(np.maximum(mel, _AMIN) / ref)
    return np.maximum(mel_db, -TOP_DB)
