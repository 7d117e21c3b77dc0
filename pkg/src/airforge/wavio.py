"""WAV input/output.

Reads 16-bit integer and 32-bit float PCM (first channel of
multichannel files); always writes mono 32-bit float.
"""
from __future__ import annotations

import os
import tempfile
from pathlib import Path

import numpy as np
from scipy.io import wavfile

from .air import Air
from .errors import DataError


def read_wav(path) -> Air:
    """Load a WAV file as a mono float64 Air."""
    try:
        rate, data = wavfile.read(str(path))
    except FileNotFoundError:
        raise
    except Exception as exc:  # noqa: BLE001 - scipy raises plain ValueError
        raise DataError(f"unreadable WAV file {path}: {exc}") from exc

    if data.ndim > 1:
        data = data[:, 0]
    if data.dtype == np.int16:
        samples = data.astype(np.float64) / 32768.0
    elif data.dtype in (np.float32, np.float64):
        samples = data.astype(np.float64)
    else:
        raise DataError(
            f"unsupported WAV sample format {data.dtype} in {path}; "
            "expected 16-bit PCM or 32-bit float"
        )
    return Air(samples, int(rate))


def write_wav(path, air: Air) -> None:
    """Write ``air`` as 32-bit float PCM, atomically (temp + rename)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = air.samples.astype(np.float32)
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".wav.tmp")
    try:
        os.close(fd)
        wavfile.write(tmp, air.sample_rate, data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
