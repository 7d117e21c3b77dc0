import numpy as np
import pytest

from airforge.synth import synthetic_air

FS = 16000


@pytest.fixture(scope="session")
def fs():
    return FS


@pytest.fixture(scope="session")
def model_air():
    """A mid-sized synthetic AIR shared by read-only tests."""
    return synthetic_air(sample_rate=FS, duration=0.8, t60=0.5, noise_floor_db=-60, seed=11)


@pytest.fixture(scope="session")
def model_air_set():
    """Three AIRs with different T60s for grid-style tests."""
    return [
        synthetic_air(sample_rate=FS, duration=0.7, t60=0.3, noise_floor_db=-60, seed=31),
        synthetic_air(sample_rate=FS, duration=0.9, t60=0.6, noise_floor_db=-60, seed=32),
        synthetic_air(sample_rate=FS, duration=1.5, t60=1.2, noise_floor_db=-60, seed=33),
    ]


def assert_same_signal(a, b, tol=0.0):
    assert a.sample_rate == b.sample_rate
    assert len(a) == len(b)
    if tol == 0.0:
        assert np.array_equal(a.samples, b.samples)
    else:
        assert np.max(np.abs(a.samples - b.samples)) <= tol
