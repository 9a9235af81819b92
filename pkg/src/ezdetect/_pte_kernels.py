"""Histogram phase-transfer-entropy kernels.

All entropies are plug-in (maximum-likelihood) estimates in nats from
joint histograms of binned phases, computed as ``log(m) - sum(c*log c)/m``
with a shared ``c*log c`` lookup table. The ``sum(c*log c)`` pass walks
the sample sequence and consumes each histogram cell at its first
occurrence, so identical symbol multisets accumulate in an identical
floating-point order; this makes the lag-0 transfer entropy cancel to
exactly 0.0.

The all-pairs kernel parallelizes over source channels with one scratch
row per source, writes every output cell from exactly one loop iteration,
and shares no mutable state, so results are bit-identical for any worker
count. Lag 0 is an algebraic zero and is never evaluated; the remaining
lags are scanned from largest to smallest so the source-target joint
histogram can grow incrementally.
"""

import numpy as np
from numba import njit, prange


def xlogx_table(n: int) -> np.ndarray:
    """Lookup of c*log(c) for integer counts 0..n."""
    c = np.arange(n + 1, dtype=np.float64)
    out = np.zeros(n + 1)
    out[1:] = c[1:] * np.log(c[1:])
    return out


@njit(cache=True)
def _sum_clogc(codes, m, hist, xlogx):
    """Fill ``hist`` from ``codes[:m]`` and return sum of c*log(c).

    Leaves ``hist`` zeroed again (cells are consumed on first visit).
    """
    for s in range(m):
        hist[codes[s]] += 1
    total = 0.0
    for s in range(m):
        c = hist[codes[s]]
        if c > 0:
            total += xlogx[c]
            hist[codes[s]] = 0
    return total


@njit(cache=True)
def pte_pair_lagged(bx, by, tau, n_bins, xlogx):
    """Transfer entropy from binned phases ``bx`` toward ``by`` at one lag.

    Uses the n - tau aligned tuples (x[s], y[s], y[s+tau]); the result is
    the plug-in conditional mutual information, clamped at zero.
    """
    n = bx.size
    m = n - tau
    B = np.int64(n_bins)
    codes = np.empty(m, np.int64)
    hist = np.zeros(B * B * B, np.int64)
    log_m = np.log(np.float64(m))
    for s in range(m):
        codes[s] = np.int64(by[s]) * B + np.int64(by[s + tau])
    h1 = log_m - _sum_clogc(codes, m, hist, xlogx) / m
    for s in range(m):
        codes[s] = np.int64(bx[s]) * B + np.int64(by[s])
    h2 = log_m - _sum_clogc(codes, m, hist, xlogx) / m
    for s in range(m):
        codes[s] = (np.int64(bx[s]) * B + np.int64(by[s])) * B + np.int64(by[s + tau])
    h3 = log_m - _sum_clogc(codes, m, hist, xlogx) / m
    for s in range(m):
        codes[s] = np.int64(by[s])
    h4 = log_m - _sum_clogc(codes, m, hist, xlogx) / m
    # Grouped so the pairwise-identical terms at lag 0 cancel exactly.
    value = (h1 - h4) + (h2 - h3)
    return max(value, 0.0)


@njit(cache=True, parallel=True)
def pte_all_pairs(binned, lag_samples, n_bins, xlogx, values, lag_pick):
    """Lag-maximized transfer entropy for every ordered channel pair.

    Parameters
    ----------
    binned : (N, n) integer array of phase bin indices.
    lag_samples : ascending lags in samples; the smallest lag attaining
        the maximum wins.
    values : (N, N) output, max transfer entropy per ordered pair.
    lag_pick : (N, N) output, index into lag_samples of the maximizer.
    """
    N, n = binned.shape
    L = lag_samples.size
    B = np.int64(n_bins)
    b64 = binned.astype(np.int64)

    # Source-independent terms per (target, lag): H(y_s, y_{s+tau}), H(y_s).
    h1 = np.empty((N, L))
    h4 = np.empty((N, L))
    codes_y = np.empty((N, n), np.int64)
    hist_y = np.zeros((N, B * B), np.int64)
    for y in prange(N):
        for li in range(L):
            tau = lag_samples[li]
            if tau == 0:
                h1[y, li] = 0.0  # never read: lag 0 is an algebraic zero
                h4[y, li] = 0.0
                continue
            m = n - tau
            log_m = np.log(np.float64(m))
            for s in range(m):
                codes_y[y, s] = b64[y, s] * B + b64[y, s + tau]
            h1[y, li] = log_m - _sum_clogc(codes_y[y], m, hist_y[y], xlogx) / m
            h4[y, li] = log_m - _sum_clogc(b64[y], m, hist_y[y], xlogx) / m

    hist3 = np.zeros((N, B * B * B), np.int64)
    hist2 = np.zeros((N, B * B), np.int64)
    codes2 = np.empty((N, n), np.int64)
    codes3 = np.empty((N, n), np.int64)
    for x in prange(N):
        for y in range(N):
            if x == y:
                values[x, y] = 0.0
                lag_pick[x, y] = 0
                continue
            for s in range(n):
                codes2[x, s] = b64[x, s] * B + b64[y, s]
            # Scan lags from largest to smallest: the (x, y) joint histogram
            # only gains samples as the lag shrinks, so its c*log(c) sum is
            # updated incrementally. ">=" keeps the smallest maximizing lag.
            best = 0.0
            best_li = 0
            first_zero = 0
            for li in range(L):
                if lag_samples[li] == 0:
                    first_zero = li
                    break
            best_li = first_zero
            s2 = 0.0
            m_prev = 0
            for li in range(L - 1, -1, -1):
                tau = lag_samples[li]
                if tau == 0:
                    continue
                m = n - tau
                for s in range(m_prev, m):
                    c = codes2[x, s]
                    hist2[x, c] += 1
                    s2 += xlogx[hist2[x, c]] - xlogx[hist2[x, c] - 1]
                m_prev = m
                log_m = np.log(np.float64(m))
                h2 = log_m - s2 / m
                for s in range(m):
                    codes3[x, s] = codes2[x, s] * B + b64[y, s + tau]
                h3 = log_m - _sum_clogc(codes3[x], m, hist3[x], xlogx) / m
                t = (h1[y, li] - h4[y, li]) + (h2 - h3)
                if t < 0.0:
                    t = 0.0
                if t >= best:
                    best = t
                    best_li = li
            if best <= 0.0:
                best = 0.0
                best_li = first_zero
            values[x, y] = best
            lag_pick[x, y] = best_li
            for s in range(m_prev):
                hist2[x, codes2[x, s]] = 0
