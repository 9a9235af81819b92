"""Per-channel desynchronization levels from the connectivity tensor.

A channel desynchronizes when its inward connections collapse below the
network's lower quartile while its outward influence persists: the level
contrasts the channel's inward-connectivity deficit against its outward
excess, both measured on smoothed connectivity.
"""

from dataclasses import dataclass, field

import numpy as np

from .charts import ewma
from .connectivity import ConnectivityTensor, connectivity_tensor
from .ei import IndexScoreTable, score_series_table
from .windows import WindowPlan

# Floor for the outward-excess denominator; a channel with no outward
# surplus would otherwise divide by zero.
DEN_EPS = 1e-9
# Levels are clamped to this percentile of the epoch's own distribution so
# one near-zero denominator cannot dominate the charts.
CAP_PERCENTILE = 99.9


@dataclass(frozen=True)
class NetworkStatsSeries:
    """Quartiles of the off-diagonal connectivity per window, raw and smoothed."""

    window_times: np.ndarray = field(repr=False)
    p25: np.ndarray = field(repr=False)
    median: np.ndarray = field(repr=False)
    p75: np.ndarray = field(repr=False)
    p25_smooth: np.ndarray = field(repr=False)
    median_smooth: np.ndarray = field(repr=False)
    p75_smooth: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class DesyncSeries:
    """Desynchronization levels and their construction pieces.

    All arrays are (n_channels, n_windows). ``levels`` is capped at the
    epoch's ``CAP_PERCENTILE``; ``no_outbound`` flags windows where a
    channel had no abnormal outward connection (denominator floored).
    """

    channel_names: tuple
    window_times: np.ndarray = field(repr=False)
    levels: np.ndarray = field(repr=False)
    in_size: np.ndarray = field(repr=False)
    out_size: np.ndarray = field(repr=False)
    psi_in: np.ndarray = field(repr=False)
    psi_hat_in: np.ndarray = field(repr=False)
    psi_out: np.ndarray = field(repr=False)
    psi_hat_out: np.ndarray = field(repr=False)
    no_outbound: np.ndarray = field(repr=False)
    cap: float = float("inf")


def network_stats(tensor: ConnectivityTensor, alpha: float = 1.0) -> NetworkStatsSeries:
    """Per-window quartiles of all off-diagonal connections, then EWMA."""
    if tensor.n_windows == 0:
        raise ValueError("empty tensor")
    off = tensor.values[:, tensor.offdiag_mask()]  # (W, N*(N-1))
    p25, med, p75 = np.percentile(off, [25.0, 50.0, 75.0], axis=1)
    return NetworkStatsSeries(
        window_times=tensor.window_times,
        p25=p25,
        median=med,
        p75=p75,
        p25_smooth=ewma(p25, alpha),
        median_smooth=ewma(med, alpha),
        p75_smooth=ewma(p75, alpha),
    )


def smooth_tensor(tensor: ConnectivityTensor, alpha: float) -> np.ndarray:
    """EWMA of every directed connection over window time, shape (W, N, N)."""
    vals = np.moveaxis(tensor.values, 0, -1)  # (N, N, W)
    return np.moveaxis(ewma(vals, alpha), -1, 0)


def abnormal_sets(smoothed_w: np.ndarray, p25: float, p75: float, x: int):
    """Channels with abnormal connectivity toward and from channel ``x``
    in one window of smoothed values.

    Inward-abnormal channels send at most the lower-quartile connectivity
    into x; outward-abnormal ones receive at least the upper quartile
    from x. Comparisons are inclusive.
    """
    N = smoothed_w.shape[0]
    others = np.arange(N) != x
    inward = smoothed_w[:, x]
    outward = smoothed_w[x, :]
    n_in = set(np.flatnonzero(others & (inward <= p25)))
    n_out = set(np.flatnonzero(others & (outward >= p75)))
    return n_in, n_out


def desync_level(psi_in, psi_hat_in, psi_out, psi_hat_out) -> float:
    """Inward deficit over outward excess, variance-stabilized by square
    roots; zero when there is no inward deficit."""
    num = np.sqrt(psi_hat_in) - np.sqrt(psi_in)
    if num <= 0.0:
        return 0.0
    den = max(np.sqrt(psi_out) - np.sqrt(psi_hat_out), DEN_EPS)
    return float(num / den)


def desync_series(tensor: ConnectivityTensor, alpha: float = 1.0) -> tuple:
    """Desynchronization level of every channel in every window.

    Returns ``(DesyncSeries, NetworkStatsSeries)``. Quartiles and
    per-connection values are EWMA-smoothed with ``alpha`` before the
    abnormal sets and densities are formed.
    """
    stats = network_stats(tensor, alpha)
    sm = smooth_tensor(tensor, alpha)  # (W, N, N)
    W, N, _ = sm.shape
    diag = np.eye(N, dtype=bool)

    p25 = stats.p25_smooth[:, None, None]
    p75 = stats.p75_smooth[:, None, None]
    med = stats.median_smooth[:, None]

    in_mask = (sm <= p25) & ~diag  # [w, y, x]: y abnormal toward x
    out_mask = (sm >= p75) & ~diag  # [w, x, y]: x abnormal toward y

    psi_in = np.einsum("wyx,wyx->wx", in_mask, sm)
    in_size = in_mask.sum(axis=1)  # (W, N) count over y
    psi_hat_in = in_size * med
    psi_out = np.einsum("wxy,wxy->wx", out_mask, sm)
    out_size = out_mask.sum(axis=2)
    psi_hat_out = out_size * med

    num = np.sqrt(psi_hat_in) - np.sqrt(psi_in)
    den = np.maximum(np.sqrt(psi_out) - np.sqrt(psi_hat_out), DEN_EPS)
    levels = np.where(num <= 0.0, 0.0, num / den)  # (W, N)

    cap = float(np.percentile(levels, CAP_PERCENTILE))
    levels = np.minimum(levels, cap)

    series = DesyncSeries(
        channel_names=tuple(tensor.channel_names),
        window_times=tensor.window_times,
        levels=levels.T.copy(),
        in_size=in_size.T.copy(),
        out_size=out_size.T.copy(),
        psi_in=psi_in.T.copy(),
        psi_hat_in=psi_hat_in.T.copy(),
        psi_out=psi_out.T.copy(),
        psi_hat_out=psi_hat_out.T.copy(),
        no_outbound=(out_size.T == 0).copy(),
        cap=cap,
    )
    return series, stats


def compute_di(
    rec,
    plan: WindowPlan,
    ann,
    tau_max_s: float = 0.10,
    lag_step_s: float = 0.010,
    alpha: float = 1.0,
    gamma: float = 0.0,
    delta: float = 5.0,
    m: int = 10,
    *,
    bin_rule: str = "ceil",
    threads: int | None = None,
    cusum_init: str = "zero",
    cusum_norm: str = "mean",
    tensor: ConnectivityTensor | None = None,
) -> IndexScoreTable:
    """Full desynchronization scoring of every channel.

    Chart baseline, activation, tonicity, selection, and scoring follow
    the same settings as the energy-ratio pipeline. A precomputed
    ``tensor`` for the same recording and plan may be passed to skip
    the connectivity stage.
    """
    if tensor is None:
        tensor = connectivity_tensor(
            rec, plan, tau_max_s, lag_step_s, bin_rule=bin_rule, threads=threads
        )
    series, _ = desync_series(tensor, alpha)
    return score_series_table(
        "DI",
        plan.window_times,
        series.levels,
        ann,
        gamma,
        delta,
        m,
        plan.shift_s,
        cusum_init=cusum_init,
        cusum_norm=cusum_norm,
        channel_names=rec.channel_names,
    )
