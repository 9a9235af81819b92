import numpy as np
import pytest

from ezdetect import (
    IndexScoreTable,
    aggregate_patients,
    classify,
    detection_metrics,
    fuse,
    fused_roc_auc,
    normalize_scores,
    roc_auc,
)


def table_from_scores(scores, names=None, m=None, activations=None, detector="EI"):
    scores = np.asarray(scores, dtype=np.float64)
    n = scores.size
    names = tuple(names) if names else tuple(f"C{i:02d}" for i in range(n))
    acts = np.asarray(activations, dtype=np.float64) if activations is not None else np.zeros(n)
    selected = scores > 0
    return IndexScoreTable(
        detector=detector,
        channel_names=names,
        raw_score=scores,
        activation_time=acts,
        tonicity=scores.copy(),
        peak_value=scores.copy(),
        selected=selected,
        m=m if m is not None else int(selected.sum()),
    )


class TestNormalizeClassify:
    def test_normalization(self):
        result = normalize_scores(table_from_scores([2.0, 1.0, 0.0]))
        np.testing.assert_allclose(result.normalized, [1.0, 0.5, 0.0])

    def test_all_zero_guard(self):
        result = normalize_scores(table_from_scores([0.0, 0.0]))
        np.testing.assert_array_equal(result.normalized, [0.0, 0.0])

    def test_single_channel(self):
        result = normalize_scores(table_from_scores([7.0]))
        assert result.normalized[0] == 1.0

    def test_negative_rejected(self):
        with pytest.raises(ValueError, match="nonnegative"):
            normalize_scores(table_from_scores([-1.0, 2.0]))

    def test_classify_eta_zero_keeps_selected_actives(self):
        result = normalize_scores(table_from_scores([3.0, 1.0, 0.0]))
        assert classify(result, 0.0) == {"C00", "C01"}

    def test_classify_eta_one_empty(self):
        result = normalize_scores(table_from_scores([3.0, 1.0]))
        assert classify(result, 1.0) == set()

    def test_classify_strict_threshold(self):
        result = normalize_scores(table_from_scores([1.0, 0.5, 0.2]))
        assert classify(result, 0.5) == {"C00"}

    def test_classify_eta_range(self):
        result = normalize_scores(table_from_scores([1.0]))
        with pytest.raises(ValueError, match="eta"):
            classify(result, 1.5)


class TestFuse:
    def test_or(self):
        assert fuse({"A", "B"}, {"B", "C"}, "OR") == {"A", "B", "C"}

    def test_and(self):
        assert fuse({"A", "B"}, {"B", "C"}, "AND") == {"B"}

    def test_or_identity(self):
        assert fuse({"A", "B"}, set(), "OR") == {"A", "B"}

    def test_unknown_mode(self):
        with pytest.raises(ValueError, match="fusion mode"):
            fuse(set(), set(), "XOR")


class TestDetectionMetrics:
    def test_perfect(self):
        rep = detection_metrics({"A", "B"}, {"A", "B"}, ["A", "B", "C"])
        assert (rep.sensitivity, rep.precision, rep.accuracy) == (1.0, 1.0, 1.0)

    def test_disjoint_sets_arithmetic(self):
        channels = [f"C{i:03d}" for i in range(100)]
        pred = set(channels[:5])
        truth = set(channels[5:10])
        rep = detection_metrics(pred, truth, channels)
        assert rep.sensitivity == 0.0
        assert rep.precision == 0.0
        assert rep.accuracy == pytest.approx(0.90)

    def test_empty_pred_zero_precision(self):
        rep = detection_metrics(set(), {"A"}, ["A", "B"])
        assert rep.precision == 0.0

    def test_empty_truth_rejected(self):
        with pytest.raises(ValueError, match="no ground truth"):
            detection_metrics({"A"}, set(), ["A", "B"])

    def test_counts_sum_to_n(self):
        rep = detection_metrics({"A", "B"}, {"B", "C"}, ["A", "B", "C", "D"])
        assert rep.tp + rep.fp + rep.tn + rep.fn == 4

    def test_accuracy_one_iff_equal(self):
        rep = detection_metrics({"A"}, {"A"}, ["A", "B"])
        assert rep.accuracy == 1.0
        rep = detection_metrics({"A", "B"}, {"A"}, ["A", "B"])
        assert rep.accuracy < 1.0


class TestRocAuc:
    def test_perfect_ranking_auc_one(self):
        table = table_from_scores([5.0, 4.0, 3.0, 0.2, 0.1, 0.05], m=3)
        rep = roc_auc(table, {"C00", "C01", "C02"})
        assert rep.auc == pytest.approx(1.0)

    def test_inverted_ranking_auc_zero(self):
        table = table_from_scores([0.05, 0.1, 0.2, 3.0, 4.0, 5.0], m=3)
        rep = roc_auc(table, {"C00", "C01", "C02"})
        assert rep.auc == pytest.approx(0.0)

    def test_terminal_point_sensitivity_and_fpr_one(self):
        table = table_from_scores([3.0, 2.0, 1.0, 0.5], m=2)
        rep = roc_auc(table, {"C01", "C03"})
        last = rep.roc_points[-1]
        assert last.m == 4
        assert last.tpr == 1.0 and last.fpr == 1.0

    def test_auc_invariant_under_monotone_transform(self, rng):
        scores = rng.uniform(0.1, 5.0, 20)
        truth = {f"C{i:02d}" for i in rng.choice(20, 6, replace=False)}
        a = roc_auc(table_from_scores(scores, m=5), truth).auc
        b = roc_auc(table_from_scores(np.exp(scores), m=5), truth).auc
        assert a == pytest.approx(b)

    def test_degenerate_truth_rejected(self):
        table = table_from_scores([1.0, 2.0])
        with pytest.raises(ValueError, match="degenerate truth"):
            roc_auc(table, set())
        with pytest.raises(ValueError, match="degenerate truth"):
            roc_auc(table, {"C00", "C01"})

    def test_fpr_tpr_monotone_over_sweep(self, rng):
        scores = rng.uniform(0.0, 5.0, 30)
        truth = {f"C{i:02d}" for i in rng.choice(30, 8, replace=False)}
        rep = roc_auc(table_from_scores(scores, m=10), truth)
        fprs = [p.fpr for p in rep.roc_points]
        tprs = [p.tpr for p in rep.roc_points]
        assert np.all(np.diff(fprs) >= 0)
        assert np.all(np.diff(tprs) >= 0)


class TestFusedRoc:
    def test_or_dominates_parts_pointwise(self, rng):
        names = [f"C{i:02d}" for i in range(20)]
        a = table_from_scores(rng.uniform(0, 1, 20), names=names, m=5, detector="EI")
        b = table_from_scores(rng.uniform(0, 1, 20), names=names, m=5, detector="DI")
        truth = set(rng.choice(names, 5, replace=False))
        rep_a = roc_auc(a, truth)
        rep_b = roc_auc(b, truth)
        rep_or = fused_roc_auc(a, b, "OR", truth)
        for pa, pb, po in zip(rep_a.roc_points, rep_b.roc_points, rep_or.roc_points):
            assert po.tpr >= max(pa.tpr, pb.tpr) - 1e-12

    def test_and_subset_of_parts(self, rng):
        names = [f"C{i:02d}" for i in range(15)]
        a = table_from_scores(rng.uniform(0, 1, 15), names=names, m=4, detector="EI")
        b = table_from_scores(rng.uniform(0, 1, 15), names=names, m=4, detector="DI")
        truth = set(rng.choice(names, 4, replace=False))
        rep_and = fused_roc_auc(a, b, "AND", truth)
        rep_a = roc_auc(a, truth)
        for pa, pf in zip(rep_a.roc_points, rep_and.roc_points):
            assert pf.tp <= pa.tp

    def test_terminal_point(self, rng):
        names = [f"C{i:02d}" for i in range(10)]
        a = table_from_scores(rng.uniform(0, 1, 10), names=names, m=3)
        b = table_from_scores(rng.uniform(0, 1, 10), names=names, m=3)
        truth = {names[0], names[4]}
        for mode in ("AND", "OR"):
            rep = fused_roc_auc(a, b, mode, truth)
            assert rep.roc_points[-1].tpr == 1.0
            assert rep.roc_points[-1].fpr == 1.0

    def test_mismatched_channels_rejected(self):
        a = table_from_scores([1.0], names=["A"])
        b = table_from_scores([1.0], names=["B"])
        with pytest.raises(ValueError, match="share the channel set"):
            fused_roc_auc(a, b, "OR", {"A"})


class TestAggregate:
    def test_identical_reports(self):
        table = table_from_scores([5.0, 1.0, 0.2, 0.1], m=2)
        rep = roc_auc(table, {"C00"})
        agg = aggregate_patients([rep, rep, rep])
        assert agg.macro_auc == pytest.approx(rep.auc)
        assert agg.macro_sensitivity == pytest.approx(rep.sensitivity)
        assert agg.micro_auc == pytest.approx(rep.auc)

    def test_macro_mean_of_auc(self):
        t1 = table_from_scores([5.0, 1.0, 0.1, 0.05], m=1)
        t2 = table_from_scores([0.05, 0.1, 1.0, 5.0], m=1)
        r1 = roc_auc(t1, {"C00"})
        r2 = roc_auc(t2, {"C00"})
        agg = aggregate_patients([r1, r2])
        assert agg.macro_auc == pytest.approx((r1.auc + r2.auc) / 2)

    def test_pooled_differs_from_macro_with_unequal_sizes(self):
        # patient 1: 4 channels, patient 2: 16 channels; hand-computed pooling
        t1 = table_from_scores([3.0, 2.0, 0.1, 0.05], m=2)
        r1 = roc_auc(t1, {"C00", "C01"})  # sens 1.0, 2 TP of 2
        t2 = table_from_scores(list(np.linspace(2.0, 0.1, 16)), m=4)
        r2 = roc_auc(t2, {"C15"})  # worst-ranked channel positive: sens 0
        agg = aggregate_patients([r1, r2])
        assert agg.macro_sensitivity == pytest.approx((1.0 + 0.0) / 2)
        assert agg.micro_sensitivity == pytest.approx(2 / 3)  # 2 TP of 3 positives pooled
        assert agg.macro_sensitivity != agg.micro_sensitivity

    def test_empty_rejected(self):
        with pytest.raises(ValueError, match=">= 1 patient"):
            aggregate_patients([])
