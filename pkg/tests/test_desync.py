import numpy as np
import pytest

from ezdetect import (
    ConnectivityTensor,
    abnormal_sets,
    build_plan,
    compute_di,
    connectivity_tensor,
    desync_level,
    desync_series,
    network_stats,
)
from ezdetect.desync import DEN_EPS, smooth_tensor
from ezdetect.synthetic import BENCHMARK_GAMMA, BENCHMARK_TARGETS, benchmark_scenario, generate


def toy_tensor(values_per_window):
    """Tensor from an explicit list of (N, N) matrices; diagonals zeroed."""
    vals = np.asarray(values_per_window, dtype=np.float64)
    W, N, _ = vals.shape
    for w in range(W):
        np.fill_diagonal(vals[w], 0.0)
    return ConnectivityTensor(
        channel_names=tuple(f"C{i}" for i in range(N)),
        window_times=np.arange(W) * 0.25,
        values=vals,
        delays=np.zeros_like(vals),
    )


def uniform_tensor(c, N=4, W=6):
    return toy_tensor(np.full((W, N, N), c))


class TestNetworkStats:
    def test_uniform_network(self):
        stats = network_stats(uniform_tensor(0.7), alpha=1.0)
        for arr in (stats.p25, stats.median, stats.p75,
                    stats.p25_smooth, stats.median_smooth, stats.p75_smooth):
            np.testing.assert_allclose(arr, 0.7)

    def test_linear_interpolation_order_statistics(self):
        # off-diagonal values 1..8 per window (hand-built 3x3 plus one extra)
        vals = np.zeros((1, 3, 3))
        off = [(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)]
        for v, (i, j) in zip([1, 2, 3, 4, 5, 6], off):
            vals[0, i, j] = v
        stats = network_stats(toy_tensor(vals), alpha=1.0)
        # numpy linear interpolation over {1..6}
        assert stats.p25[0] == pytest.approx(np.percentile([1, 2, 3, 4, 5, 6], 25))
        assert stats.median[0] == pytest.approx(3.5)

    def test_values_1_to_8(self):
        # The documented example set {1..8}: p25=2.75, median=4.5, p75=6.25.
        assert np.percentile(np.arange(1, 9), 25) == pytest.approx(2.75)
        assert np.percentile(np.arange(1, 9), 50) == pytest.approx(4.5)
        assert np.percentile(np.arange(1, 9), 75) == pytest.approx(6.25)

    def test_alpha_one_smoothing_identity(self, rng):
        vals = rng.uniform(0.0, 1.0, (5, 4, 4))
        stats = network_stats(toy_tensor(vals), alpha=1.0)
        np.testing.assert_array_equal(stats.p25, stats.p25_smooth)
        np.testing.assert_array_equal(stats.median, stats.median_smooth)

    def test_quartile_ordering_preserved_by_smoothing(self, rng):
        vals = rng.uniform(0.0, 2.0, (20, 5, 5))
        stats = network_stats(toy_tensor(vals), alpha=0.3)
        assert np.all(stats.p25 <= stats.median + 1e-12)
        assert np.all(stats.median <= stats.p75 + 1e-12)
        assert np.all(stats.p25_smooth <= stats.median_smooth + 1e-12)
        assert np.all(stats.median_smooth <= stats.p75_smooth + 1e-12)

    def test_empty_tensor_rejected(self):
        empty = ConnectivityTensor(channel_names=("a",), window_times=np.array([]),
                                   values=np.zeros((0, 1, 1)), delays=np.zeros((0, 1, 1)))
        with pytest.raises(ValueError, match="empty"):
            network_stats(empty, 1.0)


class TestAbnormalSets:
    def test_uniform_network_everyone_abnormal(self):
        sm = np.full((4, 4), 0.5)
        np.fill_diagonal(sm, 0.0)
        n_in, n_out = abnormal_sets(sm, p25=0.5, p75=0.5, x=1)
        assert n_in == {0, 2, 3}
        assert n_out == {0, 2, 3}

    def test_single_low_inward_edge(self):
        sm = np.full((4, 4), 1.0)
        np.fill_diagonal(sm, 0.0)
        sm[2, 0] = 0.0  # channel 2 sends nothing toward channel 0
        n_in, n_out = abnormal_sets(sm, p25=0.5, p75=1.5, x=0)
        assert n_in == {2}

    def test_no_outward_above_p75(self):
        sm = np.full((4, 4), 1.0)
        np.fill_diagonal(sm, 0.0)
        n_in, n_out = abnormal_sets(sm, p25=0.5, p75=1.5, x=0)
        assert n_out == set()


class TestDesyncLevel:
    def test_uniform_zero(self):
        assert desync_level(psi_in=2.0, psi_hat_in=2.0, psi_out=3.0, psi_hat_out=1.0) == 0.0

    def test_isolated_window_zero(self):
        assert desync_level(0.0, 0.0, 0.0, 0.0) == 0.0

    def test_floored_denominator(self):
        d = desync_level(psi_in=0.0, psi_hat_in=4.0, psi_out=1.0, psi_hat_out=1.0)
        assert d == pytest.approx(2.0 / DEN_EPS)

    def test_regular_ratio(self):
        d = desync_level(psi_in=1.0, psi_hat_in=4.0, psi_out=9.0, psi_hat_out=4.0)
        assert d == pytest.approx((2.0 - 1.0) / (3.0 - 2.0))


class TestDesyncSeries:
    def test_uniform_network_all_zero(self):
        series, stats = desync_series(uniform_tensor(0.9), alpha=1.0)
        assert np.all(series.levels == 0.0)
        assert np.all(series.no_outbound == False)  # noqa: E712 - everyone at the boundary

    def test_toy_collapsed_inward(self):
        # Channel 0 receives nothing; everyone else uniform.
        vals = np.full((3, 4, 4), 1.0)
        vals[:, :, 0] = 0.0
        series, stats = desync_series(toy_tensor(vals), alpha=1.0)
        # all three inward edges of channel 0 are 0 <= p25, others stay at 1
        assert np.all(series.in_size[0] == 3)
        assert np.all(series.levels[0] > 0.0)
        assert np.all(series.levels[1:] == 0.0)

    def test_density_invariants_and_finiteness(self, rng):
        vals = rng.uniform(0.0, 1.5, (30, 6, 6))
        series, stats = desync_series(toy_tensor(vals), alpha=1.0)
        assert np.all(series.psi_in <= series.psi_hat_in + 1e-12)
        assert np.all(series.psi_out >= series.psi_hat_out - 1e-12)
        assert np.all(series.levels >= 0.0)
        assert np.all(np.isfinite(series.levels))

    def test_cap_is_999_percentile(self, rng):
        vals = rng.uniform(0.0, 1.5, (40, 6, 6))
        series, _ = desync_series(toy_tensor(vals), alpha=1.0)
        assert np.all(series.levels <= series.cap + 1e-15)

    def test_alpha_one_equals_unsmoothed_pipeline(self, rng):
        vals = rng.uniform(0.0, 1.5, (15, 5, 5))
        tensor = toy_tensor(vals)
        a, _ = desync_series(tensor, alpha=1.0)
        sm = smooth_tensor(tensor, 1.0)
        np.testing.assert_array_equal(sm, tensor.values)
        b, _ = desync_series(tensor, alpha=0.99999)
        np.testing.assert_allclose(a.levels, b.levels, rtol=1e-3, atol=1e-6)


class TestComputeDi:
    def test_benchmark_cut_detection_one_seed(self):
        rec, ann = generate(benchmark_scenario("desync-cut", seed=1))
        plan = build_plan(rec, 1.0, 0.25)
        table = compute_di(rec, plan, ann, gamma=BENCHMARK_GAMMA, m=16)
        order = table.rank_order()
        top5 = {table.channel_names[i] for i in order[:5]}
        assert set(BENCHMARK_TARGETS) <= top5

    def test_tensor_reuse_matches_recompute(self, rng):
        from conftest import make_recording

        rec = make_recording(rng.standard_normal((4, 4096)), fs=512.0)
        from ezdetect import EpochAnnotation

        ann = EpochAnnotation(t_base=1.0, t_start=4.0, t_end=7.0)
        plan = build_plan(rec, 1.0, 0.25)
        tensor = connectivity_tensor(rec, plan)
        a = compute_di(rec, plan, ann, m=4, tensor=tensor)
        b = compute_di(rec, plan, ann, m=4)
        np.testing.assert_array_equal(a.raw_score, b.raw_score)

    def test_channel_label_equivariance(self):
        rec, ann = generate(benchmark_scenario("desync-cut", seed=2))
        plan = build_plan(rec, 1.0, 0.25)
        tensor = connectivity_tensor(rec, plan)
        table = compute_di(rec, plan, ann, gamma=BENCHMARK_GAMMA, m=16, tensor=tensor)

        perm = np.random.default_rng(0).permutation(rec.n_channels)
        from ezdetect import Recording

        rec2 = Recording(channel_names=tuple(rec.channel_names[i] for i in perm),
                         fs=rec.fs, samples=rec.samples[perm])
        table2 = compute_di(rec2, build_plan(rec2, 1.0, 0.25), ann,
                            gamma=BENCHMARK_GAMMA, m=16)
        for i, j in enumerate(perm):
            assert table2.channel_names[i] == table.channel_names[j]
            assert table2.raw_score[i] == pytest.approx(table.raw_score[j], rel=1e-9, abs=1e-12)
