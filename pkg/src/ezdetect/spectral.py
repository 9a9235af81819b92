"""Per-window spectra and the high/low band energy ratio."""

from dataclasses import dataclass

import numpy as np

from .windows import WindowPlan, window_matrix

# Floor for the low-band energy; keeps silent channels at ratio 0 instead
# of dividing by zero (their numerator is already 0).
ENERGY_EPS = 1e-12


@dataclass(frozen=True)
class BandPair:
    """High and low frequency bands, each as (lo_hz, hi_hz)."""

    high: tuple
    low: tuple

    def validate(self, fs: float) -> None:
        for name, (lo, hi) in (("high", self.high), ("low", self.low)):
            if not 0 <= lo < hi:
                raise ValueError(f"{name} band [{lo}, {hi}] is empty or negative")
            if hi > fs / 2:
                raise ValueError(
                    f"{name} band upper edge {hi} Hz exceeds Nyquist {fs / 2} Hz"
                )


DEFAULT_BANDS = BandPair(high=(30.0, 250.0), low=(4.0, 12.0))


def window_spectrum(window: np.ndarray, fs: float):
    """Discrete power spectrum of one window over [0, fs/2].

    Returns ``(freqs_hz, power)`` scaled so that ``power.sum()`` equals the
    time-domain energy ``sum(window**2)`` (Parseval). No taper is applied.
    """
    window = np.asarray(window, dtype=np.float64)
    n = window.shape[-1]
    if n < 2:
        raise ValueError(f"window must hold >= 2 samples, got {n}")
    spec = np.fft.rfft(window, axis=-1)
    power = np.abs(spec) ** 2
    # One-sided scaling: double everything except DC and (for even n) Nyquist.
    weights = np.full(power.shape[-1], 2.0)
    weights[0] = 1.0
    if n % 2 == 0:
        weights[-1] = 1.0
    power = power * weights / n
    freqs = np.fft.rfftfreq(n, d=1.0 / fs)
    return freqs, power


def band_masks(n: int, fs: float, bands: BandPair):
    """Boolean masks of the spectrum bins whose center lies in each band."""
    freqs = np.fft.rfftfreq(n, d=1.0 / fs)
    hi_lo, hi_hi = bands.high
    lo_lo, lo_hi = bands.low
    return (freqs >= hi_lo) & (freqs <= hi_hi), (freqs >= lo_lo) & (freqs <= lo_hi)


def energy_ratio(window: np.ndarray, fs: float, bands: BandPair = DEFAULT_BANDS) -> float:
    """High-band over low-band spectral energy of one window.

    Band integrals are discrete sums over the bins whose center frequency
    lies inside the band, edges inclusive.
    """
    bands.validate(fs)
    _, power = window_spectrum(window, fs)
    mask_h, mask_l = band_masks(np.asarray(window).shape[-1], fs, bands)
    num = power[..., mask_h].sum(axis=-1)
    den = power[..., mask_l].sum(axis=-1)
    return float(num / np.maximum(den, ENERGY_EPS))


def energy_series(rec, plan: WindowPlan, bands: BandPair = DEFAULT_BANDS) -> np.ndarray:
    """Energy ratio of every channel in every window.

    Returns an array of shape ``(n_channels, n_windows)`` aligned with
    ``rec.channel_names`` and ``plan.window_times``.
    """
    bands.validate(rec.fs)
    n = plan.window_samples
    mask_h, mask_l = band_masks(n, rec.fs, bands)
    out = np.empty((len(rec.channel_names), plan.n_windows))
    for w in range(plan.n_windows):
        seg = window_matrix(rec, plan, w)
        _, power = window_spectrum(seg, rec.fs)
        num = power[:, mask_h].sum(axis=1)
        den = power[:, mask_l].sum(axis=1)
        out[:, w] = num / np.maximum(den, ENERGY_EPS)
    return out
