import numpy as np
import pytest

from ezdetect import (
    CouplingEdge,
    SynthEvent,
    SynthScenario,
    build_plan,
    connectivity_tensor,
    desync_series,
    generate,
    oracle_pte,
    pte_lagged,
)
from ezdetect.synthetic import benchmark_scenario


def two_channel_scenario(seed, strength=0.8, lag=0.020, cut=False):
    edges = (CouplingEdge("S01", "S02", lag, strength),)
    events = (SynthEvent(30.0, "desync-cut", ("S02",)),) if cut else ()
    return SynthScenario(n_channels=2, fs=512.0, duration_s=50.0, edges=edges,
                         events=events, noise_level=0.1, seed=seed,
                         t_base=10.0, t_start=30.0, t_end=45.0)


class TestGenerate:
    def test_same_seed_bit_identical(self):
        scn = benchmark_scenario("desync-cut", seed=3)
        rec1, ann1 = generate(scn)
        rec2, ann2 = generate(scn)
        np.testing.assert_array_equal(rec1.samples, rec2.samples)
        assert ann1 == ann2

    def test_different_seeds_differ(self):
        a, _ = generate(benchmark_scenario("null", seed=0))
        b, _ = generate(benchmark_scenario("null", seed=1))
        assert not np.array_equal(a.samples, b.samples)

    def test_annotation_carries_targets_as_truth(self):
        rec, ann = generate(benchmark_scenario("desync-cut", seed=0))
        assert ann.ez_channels == {"S03", "S07", "S11"}
        assert ann.t_start == 40.0 and ann.t_end == 60.0 and ann.t_base == 20.0

    def test_self_edge_rejected(self):
        scn = SynthScenario(n_channels=2, edges=(CouplingEdge("S01", "S01", 0.02, 0.5),))
        with pytest.raises(ValueError, match="self edge"):
            generate(scn)

    def test_unknown_channel_rejected(self):
        scn = SynthScenario(n_channels=2, edges=(CouplingEdge("S01", "S09", 0.02, 0.5),))
        with pytest.raises(ValueError, match="unknown channel"):
            generate(scn)

    def test_event_outside_epoch_rejected(self):
        scn = SynthScenario(n_channels=2, duration_s=10.0,
                            events=(SynthEvent(99.0, "hf-burst", ("S01",)),))
        with pytest.raises(ValueError, match="outside the epoch"):
            generate(scn)

    def test_unknown_event_kind_rejected(self):
        scn = SynthScenario(n_channels=2, events=(SynthEvent(1.0, "zap", ("S01",)),))
        with pytest.raises(ValueError, match="event kind"):
            generate(scn)

    def test_sub_sample_lag_rejected(self):
        scn = SynthScenario(n_channels=2, fs=100.0,
                            edges=(CouplingEdge("S01", "S02", 0.001, 0.5),))
        with pytest.raises(ValueError, match="below one sample"):
            generate(scn)

    def test_hf_burst_raises_high_band_energy(self):
        from ezdetect.spectral import DEFAULT_BANDS, energy_ratio

        scn = SynthScenario(n_channels=2, fs=1024.0, duration_s=40.0,
                            events=(SynthEvent(20.0, "hf-burst", ("S02",)),),
                            noise_level=0.03, seed=5, t_base=5.0, t_start=20.0, t_end=35.0)
        rec, _ = generate(scn)
        fs = int(scn.fs)
        pre = energy_ratio(rec.samples[1, 10 * fs:11 * fs], scn.fs, DEFAULT_BANDS)
        post = energy_ratio(rec.samples[1, 25 * fs:26 * fs], scn.fs, DEFAULT_BANDS)
        assert post > 50 * pre

    def test_desync_cut_freezes_inbound(self):
        scn = two_channel_scenario(seed=2, cut=True)
        rec_cut, _ = generate(scn)
        base_only, _ = generate(SynthScenario(
            n_channels=2, fs=512.0, duration_s=50.0, edges=(), events=(),
            noise_level=0.1, seed=2, t_base=10.0, t_start=30.0, t_end=45.0))
        fs = int(scn.fs)
        cut_at = 30 * fs
        # after the cut the target equals its uncoupled base signal
        np.testing.assert_allclose(rec_cut.samples[1, cut_at:], base_only.samples[1, cut_at:])
        assert not np.allclose(rec_cut.samples[1, :cut_at], base_only.samples[1, :cut_at])


class TestCoupledDirectionality:
    def test_forward_beats_reverse_in_most_windows(self):
        scn = two_channel_scenario(seed=0)
        rec, _ = generate(scn)
        plan = build_plan(rec, 1.0, 0.25)
        pre = plan.time_mask(0.0, 30.0)
        tensor = connectivity_tensor(rec, plan)
        fwd = tensor.values[pre, 0, 1]
        rev = tensor.values[pre, 1, 0]
        assert np.mean(fwd > rev) >= 0.9

    def test_zero_noise_uncoupled_pte_floor(self):
        # Deterministic oscillators, no coupling: phase futures are nearly
        # a function of phase pasts, so every value sits near zero.
        scn = SynthScenario(n_channels=4, fs=1024.0, duration_s=20.0, edges=(),
                            events=(), noise_level=0.0, seed=7)
        rec, _ = generate(scn)
        plan = build_plan(rec, 1.0, 0.5)
        tensor = connectivity_tensor(rec, plan)
        assert tensor.values.max() <= 0.3

    def test_cut_target_desync_level_rises(self):
        scn = benchmark_scenario("desync-cut", seed=4)
        rec, ann = generate(scn)
        plan = build_plan(rec, 1.0, 0.25)
        tensor = connectivity_tensor(rec, plan)
        series, _ = desync_series(tensor, 1.0)
        names = np.array(series.channel_names)
        tmask = np.isin(names, list(ann.ez_channels))
        base = plan.time_mask(ann.t_base, ann.t_start)
        post = plan.time_mask(ann.t_start + 1.0, ann.t_start + 10.0)
        for i in np.flatnonzero(tmask):
            mu = series.levels[i, base].mean()
            sd = series.levels[i, base].std() + 1e-12
            assert series.levels[i, post].mean() > mu + 3 * sd


class TestOracleEquivalenceSweep:
    def test_random_sweep_matches_fast_path(self, rng):
        for _ in range(200):
            n = int(rng.integers(200, 1200))
            tau = int(rng.integers(0, min(101, n)))
            B = int(rng.integers(4, 13))
            bx = rng.integers(0, B, n).astype(np.int16)
            by = rng.integers(0, B, n).astype(np.int16)
            fast = pte_lagged(bx, by, tau, B)
            slow = max(oracle_pte(bx, by, tau), 0.0)
            assert fast == pytest.approx(slow, abs=1e-12)
