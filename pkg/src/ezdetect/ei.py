"""Energy-ratio index pipeline: series -> CUSUM -> top-M selection -> scores.

The chart/rank/score stages are shared with the desynchronization pipeline,
which runs the identical machinery on its own driving series.
"""

from dataclasses import dataclass, field

import numpy as np

from . import charts
from .spectral import BandPair, DEFAULT_BANDS, energy_series
from .windows import WindowPlan


@dataclass(frozen=True)
class IndexScoreTable:
    """Per-channel scores of one detector.

    ``raw_score`` is zero for channels outside the selected top-M set.
    ``peak_value`` is the chart maximum used for ranking.
    """

    detector: str
    channel_names: tuple
    raw_score: np.ndarray = field(repr=False)
    activation_time: np.ndarray = field(repr=False)
    tonicity: np.ndarray = field(repr=False)
    peak_value: np.ndarray = field(repr=False)
    selected: np.ndarray = field(repr=False)
    m: int = 0

    @property
    def selected_channels(self) -> set:
        return {c for c, s in zip(self.channel_names, self.selected) if s}

    def rank_order(self) -> list:
        """Channel indices ordered by raw score (desc), activation, name."""
        keys = [
            (-self.raw_score[i], self.activation_time[i], self.channel_names[i])
            for i in range(len(self.channel_names))
        ]
        return sorted(range(len(keys)), key=lambda i: keys[i])


def with_selection(table: "IndexScoreTable", m: int) -> "IndexScoreTable":
    """The same scores restricted to a different top-M selection size.

    Equivalent to recomputing the pipeline at ``m``: per-channel activation,
    tonicity, and peak are selection-independent, and non-selected channels
    score zero.
    """
    selected = rank_by_chart(table.peak_value, table.activation_time, table.channel_names, m)
    raw = np.where(selected, np.where(table.selected, table.raw_score, 0.0), 0.0)
    # Channels newly inside the top-M need their score materialized.
    for i in np.flatnonzero(selected & ~table.selected):
        raise ValueError(
            "selection can only be narrowed from a table computed with m >= n_channels"
        )
    return IndexScoreTable(
        detector=table.detector,
        channel_names=table.channel_names,
        raw_score=raw,
        activation_time=table.activation_time.copy(),
        tonicity=table.tonicity.copy(),
        peak_value=table.peak_value.copy(),
        selected=selected,
        m=m,
    )


def rank_by_chart(peaks, activations, names, m: int) -> np.ndarray:
    """Boolean mask of the min(m, #active) channels with largest chart peaks.

    Ties break toward earlier activation, then lexicographic name. Channels
    whose chart never left zero are never selected.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    peaks = np.asarray(peaks, dtype=np.float64)
    order = sorted(
        range(len(names)), key=lambda i: (-peaks[i], activations[i], names[i])
    )
    mask = np.zeros(len(names), dtype=bool)
    taken = 0
    for i in order:
        if taken >= m:
            break
        if peaks[i] > 0.0:
            mask[i] = True
            taken += 1
    return mask


def index_value(activation: float, tonicity: float, t_start: float, shift_s: float) -> float:
    """Tonicity over activation latency, with the latency floored at one
    window shift so an activation at onset stays finite."""
    return tonicity / max(activation - t_start, shift_s)


def score_series_table(
    detector: str,
    times: np.ndarray,
    series: np.ndarray,
    ann,
    gamma: float,
    delta: float,
    m: int,
    shift_s: float,
    *,
    cusum_init: str = "zero",
    cusum_norm: str = "mean",
    channel_names=None,
) -> IndexScoreTable:
    """Chart every channel's series, rank the peaks, and score the top M.

    ``series`` is (n_channels, n_windows) aligned with ``times``; the
    baseline is estimated on [t_base, t_start) and the chart runs on
    [t_start, t_end].
    """
    names = tuple(channel_names)
    N = series.shape[0]
    peaks = np.zeros(N)
    acts = np.zeros(N)
    tons = np.zeros(N)
    for i in range(N):
        stats = charts.baseline_stats(times, series[i], (ann.t_base, ann.t_start))
        chart = charts.cusum(
            times,
            series[i],
            stats,
            gamma,
            (ann.t_start, ann.t_end),
            init=cusum_init,
            norm=cusum_norm,
            source_id=names[i],
        )
        peaks[i] = chart.peak()
        acts[i] = charts.activation_time(chart)
        tons[i] = charts.tonicity(times, series[i], acts[i], delta, shift_s)
    selected = rank_by_chart(peaks, acts, names, m)
    raw = np.zeros(N)
    for i in np.flatnonzero(selected):
        raw[i] = index_value(acts[i], tons[i], ann.t_start, shift_s)
    return IndexScoreTable(
        detector=detector,
        channel_names=names,
        raw_score=raw,
        activation_time=acts,
        tonicity=tons,
        peak_value=peaks,
        selected=selected,
        m=m,
    )


def compute_ei(
    rec,
    plan: WindowPlan,
    ann,
    bands: BandPair = DEFAULT_BANDS,
    gamma: float = 0.0,
    delta: float = 5.0,
    m: int = 10,
    *,
    cusum_init: str = "zero",
    cusum_norm: str = "mean",
) -> IndexScoreTable:
    """Full energy-ratio epileptogenicity scoring of every channel."""
    series = energy_series(rec, plan, bands)
    return score_series_table(
        "EI",
        plan.window_times,
        series,
        ann,
        gamma,
        delta,
        m,
        plan.shift_s,
        cusum_init=cusum_init,
        cusum_norm=cusum_norm,
        channel_names=rec.channel_names,
    )
