"""Binary classification metrics computed from first principles.

AUC-ROC sweeps every distinct score as a threshold and integrates the ROC
polyline with trapezoids, which equals the pairwise-ranking (Mann-Whitney)
statistic with half credit for ties. AUC-PR uses the interpolation-free
step sum over descending thresholds (average precision).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MetricError


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    def __post_init__(self):
        if min(self.tp, self.fp, self.tn, self.fn) < 0:
            raise ValueError("confusion counts must be nonnegative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


def confusion(pred, truth) -> ConfusionCounts:
    p = np.asarray(pred, dtype=np.int64)
    t = np.asarray(truth, dtype=np.int64)
    if p.shape != t.shape or p.ndim != 1:
        raise MetricError(f"prediction/truth length mismatch: {p.shape} vs {t.shape}")
    if p.size == 0:
        raise MetricError("cannot score empty inputs")
    if not (np.isin(p, (0, 1)).all() and np.isin(t, (0, 1)).all()):
        raise MetricError("predictions and truth must be binary")
    return ConfusionCounts(
        tp=int(np.sum((p == 1) & (t == 1))),
        fp=int(np.sum((p == 1) & (t == 0))),
        tn=int(np.sum((p == 0) & (t == 0))),
        fn=int(np.sum((p == 0) & (t == 1))),
    )


def f1_precision_recall(c: ConfusionCounts) -> tuple[float, float, float]:
    """(f1, precision, recall), with every 0/0 defined as 0."""
    precision = c.tp / (c.tp + c.fp) if (c.tp + c.fp) else 0.0
    recall = c.tp / (c.tp + c.fn) if (c.tp + c.fn) else 0.0
    f1 = (2 * precision * recall / (precision + recall)) if (precision + recall) else 0.0
    return f1, precision, recall


def _check_scores(scores, truth) -> tuple[np.ndarray, np.ndarray]:
    s = np.asarray(scores, dtype=np.float64)
    t = np.asarray(truth, dtype=np.int64)
    if s.shape != t.shape or s.ndim != 1 or s.size == 0:
        raise MetricError(f"bad score/truth shapes: {s.shape} vs {t.shape}")
    if not np.isin(t, (0, 1)).all():
        raise MetricError("truth must be binary")
    return s, t


def _threshold_sweep(scores: np.ndarray, truth: np.ndarray):
    """Cumulative (tp, fp) after each distinct score, descending."""
    order = np.argsort(-scores, kind="mergesort")
    s = scores[order]
    t = truth[order]
    # last index of each run of equal scores
    boundary = np.nonzero(np.diff(s))[0]
    last = np.concatenate([boundary, [len(s) - 1]])
    tp = np.cumsum(t)[last]
    fp = np.cumsum(1 - t)[last]
    return tp, fp


def roc_points(scores, truth) -> tuple[np.ndarray, np.ndarray]:
    """(fpr, tpr) polyline including the (0, 0) endpoint."""
    s, t = _check_scores(scores, truth)
    pos = int(t.sum())
    neg = len(t) - pos
    if pos == 0 or neg == 0:
        raise MetricError("AUC-ROC undefined: only one class present")
    tp, fp = _threshold_sweep(s, t)
    tpr = np.concatenate([[0.0], tp / pos])
    fpr = np.concatenate([[0.0], fp / neg])
    return fpr, tpr


def auc_roc(scores, truth) -> float:
    fpr, tpr = roc_points(scores, truth)
    return float(np.trapezoid(tpr, fpr))


def pr_points(scores, truth) -> tuple[np.ndarray, np.ndarray]:
    """(recall, precision) at each distinct descending threshold."""
    s, t = _check_scores(scores, truth)
    pos = int(t.sum())
    if pos == 0:
        raise MetricError("AUC-PR undefined: no positive examples")
    tp, fp = _threshold_sweep(s, t)
    recall = tp / pos
    precision = tp / (tp + fp)
    return recall, precision


def auc_pr(scores, truth) -> float:
    recall, precision = pr_points(scores, truth)
    prev = np.concatenate([[0.0], recall[:-1]])
    return float(np.sum((recall - prev) * precision))


def best_f1_threshold(scores, truth) -> tuple[float, float]:
    """(best F1 over all distinct-score thresholds, the threshold achieving it).

    Thresholds are evaluated with the strict ``score > threshold`` rule used
    by the detector; each candidate sits just below a distinct score.
    """
    s, t = _check_scores(scores, truth)
    pos = int(t.sum())
    best = (0.0, 1.0)
    for threshold in np.unique(s):
        pred = s >= threshold
        tp = int(np.sum(pred & (t == 1)))
        fp = int(np.sum(pred & (t == 0)))
        fn = pos - tp
        denom = 2 * tp + fp + fn
        f1 = 2 * tp / denom if denom else 0.0
        if f1 > best[0]:
            best = (f1, float(np.nextafter(threshold, -np.inf)))
    return best
