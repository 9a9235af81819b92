"""Overlapping window segmentation of a multichannel recording."""

from dataclasses import dataclass, field

import numpy as np

# Guards the window-count formula against binary representation error in
# (duration - window) / shift when shift is not a dyadic fraction.
_COUNT_EPS = 1e-9


def _round_half_up(x: float) -> int:
    return int(np.floor(x + 0.5))


@dataclass(frozen=True)
class WindowPlan:
    """Bookkeeping for overlapping windows over one epoch.

    Attributes
    ----------
    window_s : float
        Window duration in seconds.
    shift_s : float
        Time shift between consecutive window starts, seconds.
    fs : float
        Sampling frequency the plan was built against, Hz.
    window_samples : int
        Samples per window, ``round(window_s * fs)``.
    window_times : np.ndarray
        Start time of every window in seconds, strictly increasing
        with step ``shift_s``.
    """

    window_s: float
    shift_s: float
    fs: float
    window_samples: int
    window_times: np.ndarray = field(repr=False)

    @property
    def n_windows(self) -> int:
        return len(self.window_times)

    def start_sample(self, t: float) -> int:
        """Sample index where the window starting at time ``t`` begins."""
        return _round_half_up(t * self.fs)

    def time_mask(self, t_lo: float, t_hi: float, *, closed: bool = False) -> np.ndarray:
        """Boolean mask of windows with start time in [t_lo, t_hi) or [t_lo, t_hi]."""
        t = self.window_times
        if closed:
            return (t >= t_lo) & (t <= t_hi)
        return (t >= t_lo) & (t < t_hi)


def build_plan(rec, window_s: float, shift_s: float) -> WindowPlan:
    """Build the overlapping window plan for a recording.

    The number of windows is ``floor((duration - window) / shift) + 1``
    and window k starts at ``k * shift_s`` seconds.

    Raises
    ------
    ValueError
        If the window is longer than the recording, the shift is not
        positive, or the window holds fewer than 2 samples.
    """
    if shift_s <= 0:
        raise ValueError(f"shift_s must be positive, got {shift_s}")
    if window_s > rec.duration_s:
        raise ValueError(
            f"window ({window_s} s) longer than recording ({rec.duration_s} s)"
        )
    n = _round_half_up(window_s * rec.fs)
    if n < 2:
        raise ValueError(f"window of {window_s} s holds {n} samples at fs={rec.fs}; need >= 2")

    count = int(np.floor((rec.duration_s - window_s) / shift_s + _COUNT_EPS)) + 1
    times = np.arange(count) * shift_s
    # Never let a quantized window run past the end of the recording.
    n_samples = rec.samples.shape[1]
    while count > 1 and _round_half_up(times[count - 1] * rec.fs) + n > n_samples:
        count -= 1
    return WindowPlan(
        window_s=window_s,
        shift_s=shift_s,
        fs=rec.fs,
        window_samples=n,
        window_times=times[:count],
    )


def window_view(rec, plan: WindowPlan, channel: str, t: float) -> np.ndarray:
    """Read-only view of the ``plan.window_samples`` samples of ``channel``
    starting at window time ``t``.

    ``t`` must be one of ``plan.window_times``.
    """
    if not np.any(np.isclose(plan.window_times, t, rtol=0, atol=1e-12)):
        raise ValueError(f"t={t} is not a window start time of this plan")
    idx = rec.channel_index(channel)
    s0 = plan.start_sample(t)
    return rec.samples[idx, s0 : s0 + plan.window_samples]


def window_matrix(rec, plan: WindowPlan, w: int) -> np.ndarray:
    """All channels of window number ``w`` as an (n_channels, n) view."""
    s0 = plan.start_sample(plan.window_times[w])
    return rec.samples[:, s0 : s0 + plan.window_samples]
