import numpy as np
import pytest

from air_estimator.inference import infer, tile_to_window, window_starts
from air_estimator.model import build_model

FS = 16000


@pytest.fixture(scope="module")
def model():
    m = build_model()
    m.eval()
    return m


def test_ten_second_input_gives_thirteen_windows(model):
    x = np.random.default_rng(0).normal(size=10 * FS)
    result = infer(model, x, FS)
    assert result["n_windows"] == 13  # (10 - 4) / 0.5 + 1


def test_one_second_input_tiled_before_featurization(model):
    x = np.random.default_rng(1).normal(size=FS)
    tiled = tile_to_window(x, FS)
    assert tiled.size >= 4 * FS
    np.testing.assert_array_equal(tiled[:FS], x)
    result = infer(model, x, FS)
    assert result["n_windows"] == 1


def test_window_start_grid():
    assert window_starts(4 * FS, FS) == [0]
    starts = window_starts(10 * FS, FS)
    assert len(starts) == 13
    assert starts[1] - starts[0] == FS // 2


def test_median_of_agreeing_windows(model):
    # period equal to the hop: every 4 s window sees identical content
    period = np.random.default_rng(2).normal(size=FS // 2)
    x = np.tile(period, 12)  # 6 s
    result = infer(model, x, FS)
    first_window = infer(model, x[: 4 * FS], FS)
    assert result["estimate"] == pytest.approx(first_window["estimate"], abs=1e-7)


def test_invariant_to_appending_copies(model):
    period = np.random.default_rng(3).normal(size=FS // 2)
    x = np.tile(period, 8)  # exactly 4 s
    base = infer(model, x, FS)["estimate"]
    tripled = infer(model, np.tile(x, 3), FS)["estimate"]
    assert tripled == pytest.approx(base, abs=1e-7)


def test_silence_flagged_but_estimated(model):
    result = infer(model, np.zeros(5 * FS), FS)
    assert result["silent"] is True
    assert np.isfinite(result["estimate"])


def test_wrong_rate_rejected(model):
    with pytest.raises(ValueError):
        infer(model, np.zeros(4 * 8000), 8000)
