import numpy as np
import pytest

from ezdetect import Recording


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def make_recording(samples, fs=1000.0, names=None):
    samples = np.asarray(samples, dtype=np.float64)
    if names is None:
        names = tuple(f"C{i + 1:02d}" for i in range(samples.shape[0]))
    return Recording(channel_names=tuple(names), fs=fs, samples=samples)


@pytest.fixture
def tone_recording():
    """Three channels: 8 Hz, 100 Hz, and silence; 10 s at 1 kHz."""
    fs = 1000.0
    t = np.arange(int(10 * fs)) / fs
    rows = np.vstack([
        np.sin(2 * np.pi * 8.0 * t),
        np.sin(2 * np.pi * 100.0 * t),
        np.zeros_like(t),
    ])
    return make_recording(rows, fs=fs, names=("low", "high", "flat"))
