"""Score normalization, thresholding, fusion, and detection metrics.

The ROC is rank-based: the positive set at each sweep point is the top-M
channels by raw score, with M swept from 1% to 100% of the network.
"""

from dataclasses import dataclass, field

import numpy as np

from .ei import IndexScoreTable


@dataclass(frozen=True)
class DetectionResult:
    """Normalized scores and the classification rule inputs of one detector."""

    detector: str
    channel_names: tuple
    normalized: np.ndarray = field(repr=False)
    selected: np.ndarray = field(repr=False)
    m: int = 0


@dataclass(frozen=True)
class RocPoint:
    m_pct: float
    m: int
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def tpr(self) -> float:
        return self.tp / (self.tp + self.fn)

    @property
    def fpr(self) -> float:
        return self.fp / (self.fp + self.tn)


@dataclass(frozen=True)
class EvaluationReport:
    detector: str
    sensitivity: float
    precision: float
    accuracy: float
    tp: int
    fp: int
    tn: int
    fn: int
    roc_points: tuple = ()
    auc: float = float("nan")


def normalize_scores(table: IndexScoreTable) -> DetectionResult:
    """Scale raw scores into [0, 1] by the maximum; all-zero stays all-zero."""
    raw = table.raw_score
    if np.any(raw < 0):
        raise ValueError("raw scores must be nonnegative")
    top = raw.max()
    normalized = raw / top if top > 0 else np.zeros_like(raw)
    return DetectionResult(
        detector=table.detector,
        channel_names=table.channel_names,
        normalized=normalized,
        selected=table.selected.copy(),
        m=table.m,
    )


def classify(result: DetectionResult, eta: float = 0.0) -> set:
    """Channels in the detector's top-M set whose normalized score
    strictly exceeds ``eta``."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must be in [0, 1], got {eta}")
    return {
        c
        for c, sel, score in zip(result.channel_names, result.selected, result.normalized)
        if sel and score > eta
    }


def fuse(set_a: set, set_b: set, mode: str) -> set:
    """Combine two positive sets with Boolean AND (intersection) or OR (union)."""
    if mode == "AND":
        return set_a & set_b
    if mode == "OR":
        return set_a | set_b
    raise ValueError(f"unknown fusion mode {mode!r}")


def detection_metrics(pred: set, truth: set, all_channels) -> EvaluationReport:
    """Sensitivity, precision, and accuracy of a positive set against truth."""
    all_set = set(all_channels)
    if not truth:
        raise ValueError("no ground truth: empty positive class")
    if not pred <= all_set or not truth <= all_set:
        raise ValueError("pred and truth must be subsets of the channel set")
    tp = len(pred & truth)
    fp = len(pred - truth)
    fn = len(truth - pred)
    tn = len(all_set) - tp - fp - fn
    return EvaluationReport(
        detector="",
        sensitivity=tp / len(truth),
        precision=tp / len(pred) if pred else 0.0,
        accuracy=(tp + tn) / len(all_set),
        tp=tp,
        fp=fp,
        tn=tn,
        fn=fn,
    )


def _round_half_up(x: float) -> int:
    return int(np.floor(x + 0.5))


def rank_channels(table: IndexScoreTable) -> list:
    """Channel names ordered by raw score descending, with deterministic
    tie-breaking by activation time then name."""
    return [table.channel_names[i] for i in table.rank_order()]


def _confusion(pred: set, truth: set, n: int):
    tp = len(pred & truth)
    fp = len(pred - truth)
    fn = len(truth) - tp
    tn = n - tp - fp - fn
    return tp, fp, tn, fn


def _auc_from_points(points) -> float:
    xy = sorted({(p.fpr, p.tpr) for p in points})
    xy = [(0.0, 0.0)] + xy + [(1.0, 1.0)]
    xs = np.array([p[0] for p in xy])
    ys = np.array([p[1] for p in xy])
    return float(np.trapz(ys, xs))


def sweep_percentages() -> np.ndarray:
    return np.arange(1, 101, dtype=float)


def roc_auc(table: IndexScoreTable, truth: set, *, sweep=None) -> EvaluationReport:
    """Rank-based ROC and AUC of one detector by sweeping the top-M size.

    Requires at least one positive and one negative channel.
    """
    names = table.channel_names
    truth = set(truth)
    n = len(names)
    if not truth or truth >= set(names):
        raise ValueError("degenerate truth: need >= 1 positive and >= 1 negative channel")
    order = rank_channels(table)
    pcts = sweep_percentages() if sweep is None else np.asarray(sweep, dtype=float)
    points = []
    for pct in pcts:
        m = min(max(_round_half_up(pct / 100.0 * n), 1), n)
        pred = set(order[:m])
        tp, fp, tn, fn = _confusion(pred, truth, n)
        points.append(RocPoint(m_pct=float(pct), m=m, tp=tp, fp=fp, tn=tn, fn=fn))
    base = detection_metrics(set(order[: table.m]) if table.m else set(), truth, names)
    return EvaluationReport(
        detector=table.detector,
        sensitivity=base.sensitivity,
        precision=base.precision,
        accuracy=base.accuracy,
        tp=base.tp,
        fp=base.fp,
        tn=base.tn,
        fn=base.fn,
        roc_points=tuple(points),
        auc=_auc_from_points(points),
    )


def fused_roc_auc(
    table_a: IndexScoreTable,
    table_b: IndexScoreTable,
    mode: str,
    truth: set,
    *,
    sweep=None,
) -> EvaluationReport:
    """ROC of the Boolean fusion of two detectors' per-M positive sets."""
    if tuple(table_a.channel_names) != tuple(table_b.channel_names):
        raise ValueError("fused detectors must share the channel set")
    names = table_a.channel_names
    truth = set(truth)
    n = len(names)
    if not truth or truth >= set(names):
        raise ValueError("degenerate truth: need >= 1 positive and >= 1 negative channel")
    order_a = rank_channels(table_a)
    order_b = rank_channels(table_b)
    pcts = sweep_percentages() if sweep is None else np.asarray(sweep, dtype=float)
    points = []
    for pct in pcts:
        m = min(max(_round_half_up(pct / 100.0 * n), 1), n)
        pred = fuse(set(order_a[:m]), set(order_b[:m]), mode)
        tp, fp, tn, fn = _confusion(pred, truth, n)
        points.append(RocPoint(m_pct=float(pct), m=m, tp=tp, fp=fp, tn=tn, fn=fn))
    detector = f"EI-{mode.lower()}-DI"
    return EvaluationReport(
        detector=detector,
        sensitivity=float("nan"),
        precision=float("nan"),
        accuracy=float("nan"),
        tp=0,
        fp=0,
        tn=0,
        fn=0,
        roc_points=tuple(points),
        auc=_auc_from_points(points),
    )


@dataclass(frozen=True)
class AggregateReport:
    detector: str
    macro_sensitivity: float
    macro_precision: float
    macro_accuracy: float
    macro_auc: float
    micro_sensitivity: float
    micro_precision: float
    micro_accuracy: float
    micro_auc: float
    n_patients: int


def aggregate_patients(reports) -> AggregateReport:
    """Macro (unweighted per-patient mean) and micro (pooled-count) summaries.

    The micro AUC pools confusion counts across patients at each sweep
    percentage before forming the curve.
    """
    reports = list(reports)
    if not reports:
        raise ValueError("need >= 1 patient report")
    detector = reports[0].detector

    def macro(attr):
        return float(np.mean([getattr(r, attr) for r in reports]))

    tp = sum(r.tp for r in reports)
    fp = sum(r.fp for r in reports)
    tn = sum(r.tn for r in reports)
    fn = sum(r.fn for r in reports)
    n = tp + fp + tn + fn
    micro_sens = tp / (tp + fn) if tp + fn else float("nan")
    micro_prec = tp / (tp + fp) if tp + fp else 0.0
    micro_acc = (tp + tn) / n if n else float("nan")

    micro_auc = float("nan")
    if all(r.roc_points for r in reports):
        lengths = {len(r.roc_points) for r in reports}
        if len(lengths) == 1:
            pooled = []
            for idx in range(lengths.pop()):
                ps = [r.roc_points[idx] for r in reports]
                pooled.append(
                    RocPoint(
                        m_pct=ps[0].m_pct,
                        m=sum(p.m for p in ps),
                        tp=sum(p.tp for p in ps),
                        fp=sum(p.fp for p in ps),
                        tn=sum(p.tn for p in ps),
                        fn=sum(p.fn for p in ps),
                    )
                )
            micro_auc = _auc_from_points(pooled)

    return AggregateReport(
        detector=detector,
        macro_sensitivity=macro("sensitivity"),
        macro_precision=macro("precision"),
        macro_accuracy=macro("accuracy"),
        macro_auc=float(np.mean([r.auc for r in reports])),
        micro_sensitivity=micro_sens,
        micro_precision=micro_prec,
        micro_accuracy=micro_acc,
        micro_auc=micro_auc,
        n_patients=len(reports),
    )
