"""Instantaneous phases, phase binning, and the directed connectivity tensor.

Connectivity between channels is estimated per window as the lag-maximized
transfer entropy between binned instantaneous-phase sequences, giving a
directed value and a propagation delay for every ordered channel pair.
"""

import math
from contextlib import contextmanager
from dataclasses import dataclass, field

import numba
import numpy as np
from scipy.signal import hilbert

from ._pte_kernels import pte_all_pairs, pte_pair_lagged, xlogx_table
from .windows import WindowPlan, window_matrix, _round_half_up

DEFAULT_TAU_MAX_S = 0.10
DEFAULT_LAG_STEP_S = 0.010


@dataclass(frozen=True)
class ConnectivityTensor:
    """Directed per-window connectivity values and delays.

    ``values[w, x, y]`` is the connectivity channel x exerts on channel y
    during window w (nats, >= 0); ``delays[w, x, y]`` the maximizing lag in
    seconds. Diagonals are zero by convention.
    """

    channel_names: tuple
    window_times: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)  # (W, N, N)
    delays: np.ndarray = field(repr=False)  # (W, N, N)
    tau_max_s: float = DEFAULT_TAU_MAX_S
    lag_step_s: float = DEFAULT_LAG_STEP_S

    @property
    def n_channels(self) -> int:
        return len(self.channel_names)

    @property
    def n_windows(self) -> int:
        return len(self.window_times)

    def offdiag_mask(self) -> np.ndarray:
        return ~np.eye(self.n_channels, dtype=bool)


def instantaneous_phase(window: np.ndarray) -> np.ndarray:
    """Per-sample phase of the analytic signal, wrapped to [-pi, pi).

    Accepts a vector or an (n_channels, n) matrix (phases per row).
    """
    window = np.asarray(window, dtype=np.float64)
    if window.shape[-1] < 4:
        raise ValueError(f"need >= 4 samples for a phase estimate, got {window.shape[-1]}")
    theta = np.angle(hilbert(window, axis=-1))
    return np.mod(theta + np.pi, 2.0 * np.pi) - np.pi


def phase_bins(n: int, rule: str = "ceil"):
    """Histogram resolution for an n-sample phase sequence.

    The bin count follows the Sturges expression ``log2(n) + 1`` forced
    to an integer (``ceil`` by default, ``round`` optionally) so the bins
    tile the circle uniformly; returns ``(bin_count, bin_width)``.
    """
    if n < 2:
        raise ValueError(f"need >= 2 samples, got {n}")
    raw = math.log2(n) + 1.0
    if rule == "ceil":
        count = int(math.ceil(raw))
    elif rule == "round":
        count = int(math.floor(raw + 0.5))
    else:
        raise ValueError(f"unknown bin rule {rule!r}")
    return count, 2.0 * np.pi / count


def bin_phases(theta: np.ndarray, n_bins: int) -> np.ndarray:
    """Map phases in [-pi, pi) to uniform bin indices in [0, n_bins)."""
    width = 2.0 * np.pi / n_bins
    idx = np.floor((theta + np.pi) / width).astype(np.int16)
    return np.clip(idx, 0, n_bins - 1)


def lag_grid(tau_max_s: float, lag_step_s: float, fs: float):
    """Lag grid {0, step, 2*step, ..., <= tau_max} in seconds and samples."""
    if lag_step_s <= 0:
        raise ValueError(f"lag step must be positive, got {lag_step_s}")
    if tau_max_s < 0:
        raise ValueError(f"tau_max must be >= 0, got {tau_max_s}")
    count = int(math.floor(tau_max_s / lag_step_s + 1e-9)) + 1
    lags_s = np.arange(count) * lag_step_s
    lags_samp = np.array([_round_half_up(t * fs) for t in lags_s], dtype=np.int64)
    return lags_s, lags_samp


def pte_lagged(bx: np.ndarray, by: np.ndarray, tau: int, n_bins: int) -> float:
    """Transfer entropy from binned phases bx toward by at lag ``tau`` samples.

    Plug-in estimator over the n - tau aligned sample tuples, natural log,
    clamped at zero. ``tau`` must satisfy 0 <= tau < len(bx).
    """
    bx = np.ascontiguousarray(bx, dtype=np.int16)
    by = np.ascontiguousarray(by, dtype=np.int16)
    if bx.shape != by.shape:
        raise ValueError("phase sequences must have equal length")
    n = bx.size
    if not 0 <= tau < n:
        raise ValueError(f"lag {tau} outside [0, {n})")
    return float(pte_pair_lagged(bx, by, tau, n_bins, xlogx_table(n)))


def pte_max(bx: np.ndarray, by: np.ndarray, n_bins: int, lag_samples, lags_s=None):
    """Maximum transfer entropy over a lag grid and the earliest maximizer.

    Returns ``(value, delay)`` where delay is in seconds when ``lags_s``
    is given, otherwise in samples.
    """
    lag_samples = np.asarray(lag_samples, dtype=np.int64)
    if lag_samples.size == 0:
        raise ValueError("empty lag grid")
    bx = np.ascontiguousarray(bx, dtype=np.int16)
    by = np.ascontiguousarray(by, dtype=np.int16)
    table = xlogx_table(bx.size)
    best, best_i = -1.0, 0
    for i, tau in enumerate(lag_samples):
        v = float(pte_pair_lagged(bx, by, int(tau), n_bins, table))
        if v > best:
            best, best_i = v, i
    delay = lags_s[best_i] if lags_s is not None else lag_samples[best_i]
    return best, float(delay)


@contextmanager
def _thread_limit(threads):
    if threads is None:
        yield
        return
    previous = numba.get_num_threads()
    numba.set_num_threads(max(1, min(int(threads), numba.config.NUMBA_NUM_THREADS)))
    try:
        yield
    finally:
        numba.set_num_threads(previous)


def window_pte_matrix(binned: np.ndarray, lag_samples: np.ndarray, n_bins: int,
                      xlogx: np.ndarray):
    """All-pairs lag-maximized transfer entropy for one window of binned phases."""
    N = binned.shape[0]
    values = np.zeros((N, N))
    lag_pick = np.zeros((N, N), dtype=np.int64)
    pte_all_pairs(binned, lag_samples, n_bins, xlogx, values, lag_pick)
    return values, lag_pick


def connectivity_tensor(
    rec,
    plan: WindowPlan,
    tau_max_s: float = DEFAULT_TAU_MAX_S,
    lag_step_s: float = DEFAULT_LAG_STEP_S,
    *,
    bin_rule: str = "ceil",
    threads: int | None = None,
) -> ConnectivityTensor:
    """Directed connectivity values and delays for every window and pair.

    The per-(window, pair) jobs are independent and gathered in a fixed
    order, so the result does not depend on the worker count.
    """
    n = plan.window_samples
    n_bins, _ = phase_bins(n, bin_rule)
    lags_s, lags_samp = lag_grid(tau_max_s, lag_step_s, rec.fs)
    if lags_samp.max() >= n:
        raise ValueError(
            f"tau_max {tau_max_s} s is {lags_samp.max()} samples, "
            f"window holds only {n}"
        )
    N = rec.n_channels
    W = plan.n_windows
    values = np.zeros((W, N, N))
    lag_pick = np.zeros((N, N), dtype=np.int64)
    delays = np.zeros((W, N, N))
    table = xlogx_table(n)
    with _thread_limit(threads):
        for w in range(W):
            theta = instantaneous_phase(window_matrix(rec, plan, w))
            binned = np.ascontiguousarray(bin_phases(theta, n_bins))
            pte_all_pairs(binned, lags_samp, n_bins, table, values[w], lag_pick)
            delays[w] = lags_s[lag_pick]
    return ConnectivityTensor(
        channel_names=tuple(rec.channel_names),
        window_times=plan.window_times.copy(),
        values=values,
        delays=delays,
        tau_max_s=tau_max_s,
        lag_step_s=lag_step_s,
    )


# --------------------------------------------------------------------------
# tensor dump format (header + float32 values/delays), reusable across runs


def save_tensor(tensor: ConnectivityTensor, path) -> None:
    header = (
        f"version=1\n"
        f"n_windows={tensor.n_windows}\n"
        f"n_channels={tensor.n_channels}\n"
        f"channels={','.join(tensor.channel_names)}\n"
        f"window_times={','.join(repr(float(t)) for t in tensor.window_times)}\n"
        f"tau_max_s={tensor.tau_max_s!r}\n"
        f"lag_step_s={tensor.lag_step_s!r}\n"
        f"encoding=float32le\n"
        f"data\n"
    )
    with open(path, "wb") as fh:
        fh.write(header.encode("utf-8"))
        fh.write(tensor.values.astype("<f4").tobytes(order="C"))
        fh.write(tensor.delays.astype("<f4").tobytes(order="C"))


def load_tensor(path) -> ConnectivityTensor:
    from .recording import RecordingFormatError, _parse_header

    with open(path, "rb") as fh:
        fields = _parse_header(fh, path)
        raw = fh.read()
    try:
        W = int(fields["n_windows"])
        N = int(fields["n_channels"])
        names = tuple(fields["channels"].split(","))
        times = np.array([float(t) for t in fields["window_times"].split(",")])
        tau_max = float(fields["tau_max_s"])
        lag_step = float(fields["lag_step_s"])
    except (KeyError, ValueError) as exc:
        raise RecordingFormatError(f"{path}: malformed tensor header ({exc})") from None
    block = W * N * N * 4
    if len(raw) != 2 * block:
        raise RecordingFormatError(f"{path}: expected {2 * block} payload bytes, found {len(raw)}")
    values = np.frombuffer(raw[:block], dtype="<f4").reshape(W, N, N).astype(np.float64)
    delays = np.frombuffer(raw[block:], dtype="<f4").reshape(W, N, N).astype(np.float64)
    return ConnectivityTensor(
        channel_names=names,
        window_times=times,
        values=values,
        delays=delays,
        tau_max_s=tau_max,
        lag_step_s=lag_step,
    )
