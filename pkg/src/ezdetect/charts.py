"""CUSUM and EWMA control charts with activation-time and tonicity extraction.

These primitives are shared by the energy-ratio and the desynchronization
scoring pipelines: a per-channel observation series is charted against its
pre-onset baseline, the chart peak marks the channel's activation, and the
source series is integrated for a fixed horizon after activation.
"""

import warnings
from dataclasses import dataclass

import numpy as np

# A baseline mean below this magnitude cannot normalize the CUSUM increment.
MEAN_EPS = 1e-12


@dataclass(frozen=True)
class BaselineStats:
    mean: float
    std: float


@dataclass(frozen=True)
class ChartSeries:
    """Chart values over the window times of one interval."""

    times: np.ndarray
    values: np.ndarray
    kind: str  # "cusum" | "ewma"
    source_id: str = ""

    def peak(self) -> float:
        return float(self.values.max())


def baseline_stats(times: np.ndarray, values: np.ndarray, interval) -> BaselineStats:
    """Sample mean and (n-1) standard deviation over windows in [t0, t1).

    Raises
    ------
    ValueError
        If fewer than 2 windows fall inside the interval.
    """
    t0, t1 = interval
    sel = (times >= t0) & (times < t1)
    n = int(sel.sum())
    if n < 2:
        raise ValueError(f"baseline interval [{t0}, {t1}) holds {n} windows; need >= 2")
    vals = np.asarray(values, dtype=np.float64)[sel]
    return BaselineStats(mean=float(vals.mean()), std=float(vals.std(ddof=1)))


def cusum(
    times: np.ndarray,
    values: np.ndarray,
    stats: BaselineStats,
    gamma: float,
    interval,
    *,
    init: str = "zero",
    norm: str = "mean",
    source_id: str = "",
) -> ChartSeries:
    """One-sided CUSUM chart of a series over [t_start, t_end].

    Each step accumulates ``(value - mean) / mean - gamma`` (or the
    z-scored deviation with ``norm="zscore"``), clamped at zero from
    below. ``init="zero"`` seeds the accumulator to 0 one step before
    the interval; ``init="literal"`` starts the chart at the raw first
    observation instead.

    A baseline mean (or std, for z-scoring) smaller than ``MEAN_EPS``
    is degenerate: the chart is returned identically zero and a warning
    is emitted.
    """
    if init not in ("zero", "literal"):
        raise ValueError(f"unknown cusum init {init!r}")
    if norm not in ("mean", "zscore"):
        raise ValueError(f"unknown cusum norm {norm!r}")
    t0, t1 = interval
    sel = (times >= t0) & (times <= t1)
    if not sel.any():
        raise ValueError(f"chart interval [{t0}, {t1}] holds no windows")
    t = times[sel]
    omega = np.asarray(values, dtype=np.float64)[sel]

    scale = stats.mean if norm == "mean" else stats.std
    if abs(scale) < MEAN_EPS:
        warnings.warn(
            f"degenerate baseline for {source_id or 'series'} "
            f"({norm}={scale!r}); chart forced to zero",
            stacklevel=2,
        )
        return ChartSeries(times=t, values=np.zeros_like(omega), kind="cusum", source_id=source_id)

    dev = (omega - stats.mean) / scale - gamma
    out = np.empty_like(omega)
    acc = 0.0
    for k in range(omega.size):
        if k == 0 and init == "literal":
            acc = omega[0]
        else:
            acc = max(0.0, acc + dev[k])
        out[k] = acc
    return ChartSeries(times=t, values=out, kind="cusum", source_id=source_id)


def ewma(values: np.ndarray, alpha: float) -> np.ndarray:
    """Exponentially weighted moving average over the whole series.

    ``out[0] = values[0]`` and ``out[k] = alpha * values[k] + (1 - alpha)
    * out[k-1]``. Works on 1-D series or along the last axis of a matrix.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    vals = np.asarray(values, dtype=np.float64)
    out = np.empty_like(vals)
    out[..., 0] = vals[..., 0]
    for k in range(1, vals.shape[-1]):
        out[..., k] = alpha * vals[..., k] + (1.0 - alpha) * out[..., k - 1]
    return out


def ewma_chart(times: np.ndarray, values: np.ndarray, alpha: float, source_id: str = "") -> ChartSeries:
    return ChartSeries(times=np.asarray(times), values=ewma(values, alpha), kind="ewma", source_id=source_id)


def activation_time(chart: ChartSeries) -> float:
    """Earliest window time at which the chart attains its maximum."""
    return float(chart.times[int(np.argmax(chart.values))])


def tonicity(
    times: np.ndarray,
    values: np.ndarray,
    activation: float,
    delta: float,
    shift_s: float,
) -> float:
    """Left-Riemann integral of the source series over
    [activation, activation + delta), truncated at the epoch end.
    """
    if delta <= 0:
        raise ValueError(f"delta must be positive, got {delta}")
    sel = (times >= activation) & (times < activation + delta)
    return float(shift_s * np.asarray(values, dtype=np.float64)[sel].sum())
