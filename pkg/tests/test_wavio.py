import numpy as np
import pytest
from scipy.io import wavfile

from airforge.air import Air
from airforge.errors import DataError
from airforge.synth import white_noise
from airforge.wavio import read_wav, write_wav

FS = 16000


def test_float32_round_trip(tmp_path):
    air = white_noise(0.5, FS, seed=1)
    path = tmp_path / "x.wav"
    write_wav(path, air)
    back = read_wav(path)
    assert back.sample_rate == FS
    np.testing.assert_array_equal(back.samples, air.samples.astype(np.float32))


def test_reads_int16(tmp_path):
    path = tmp_path / "i16.wav"
    data = (np.linspace(-1, 1, 1000) * 32767).astype(np.int16)
    wavfile.write(path, FS, data)
    air = read_wav(path)
    assert np.max(np.abs(air.samples)) <= 1.0
    assert air.samples[0] == pytest.approx(-32767 / 32768)


def test_first_channel_of_multichannel(tmp_path):
    path = tmp_path / "st.wav"
    left = np.ones(100, dtype=np.float32)
    right = np.zeros(100, dtype=np.float32)
    wavfile.write(path, FS, np.stack([left, right], axis=1))
    air = read_wav(path)
    np.testing.assert_array_equal(air.samples, left)


def test_unsupported_format_rejected(tmp_path):
    path = tmp_path / "u8.wav"
    wavfile.write(path, FS, np.zeros(100, dtype=np.uint8))
    with pytest.raises(DataError):
        read_wav(path)


def test_garbage_rejected(tmp_path):
    path = tmp_path / "bad.wav"
    path.write_bytes(b"RIFFgarbage")
    with pytest.raises(DataError):
        read_wav(path)


def test_write_emits_float32(tmp_path):
    path = tmp_path / "f32.wav"
    write_wav(path, Air(np.linspace(-1, 1, 256), FS))
    rate, data = wavfile.read(path)
    assert data.dtype == np.float32
