"""Fold evaluation and report emission.

Each fold scores the pooled blocks of its test patients twice: once on the
raw per-block probabilities and once on the chain-smoothed marginals.
Thresholded metrics use the strict ``score > threshold`` detector rule;
AUCs sweep all thresholds. Folds whose test blocks contain a single class
get ``None`` for the undefined metrics, with a warning.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .blocks_io import atomic_write_text
from .errors import MetricError
from .folds import FoldPlan
from .metrics import (
    auc_pr,
    auc_roc,
    best_f1_threshold,
    confusion,
    f1_precision_recall,
    pr_points,
    roc_points,
)

METRIC_NAMES = ("auc_roc", "auc_pr", "f1", "precision", "recall")


@dataclass
class SeriesMetrics:
    auc_roc: float | None
    auc_pr: float | None
    f1: float
    precision: float
    recall: float
    best_f1: float
    best_f1_threshold: float

    def to_json(self) -> dict:
        return {
            "auc_roc": self.auc_roc,
            "auc_pr": self.auc_pr,
            "f1": self.f1,
            "precision": self.precision,
            "recall": self.recall,
            "best_f1": self.best_f1,
            "best_f1_threshold": self.best_f1_threshold,
        }


@dataclass
class FoldResult:
    fold_index: int
    test_patients: tuple[str, ...]
    n_blocks: int
    n_positive: int
    raw: SeriesMetrics
    smoothed: SeriesMetrics

    def to_json(self) -> dict:
        return {
            "fold": self.fold_index,
            "test_patients": list(self.test_patients),
            "n_blocks": self.n_blocks,
            "n_positive": self.n_positive,
            "raw": self.raw.to_json(),
            "smoothed": self.smoothed.to_json(),
        }


def _score_series(scores: np.ndarray, truth: np.ndarray, threshold: float,
                  what: str) -> SeriesMetrics:
    pred = (scores > threshold).astype(np.int64)
    f1, precision, recall = f1_precision_recall(confusion(pred, truth))
    try:
        roc = auc_roc(scores, truth)
        pr = auc_pr(scores, truth)
        best, best_thr = best_f1_threshold(scores, truth)
    except MetricError as exc:
        warnings.warn(f"{what}: {exc}; reporting null AUCs", stacklevel=2)
        roc = pr = None
        best, best_thr = f1, threshold
    return SeriesMetrics(
        auc_roc=roc, auc_pr=pr, f1=f1, precision=precision, recall=recall,
        best_f1=best, best_f1_threshold=best_thr,
    )


def evaluate_fold(
    raw_scores: np.ndarray,
    smoothed_scores: np.ndarray,
    truth: np.ndarray,
    threshold: float = 0.5,
    fold_index: int = 0,
    test_patients: tuple[str, ...] = (),
) -> FoldResult:
    """Score one fold's pooled test blocks on both series."""
    raw_scores = np.asarray(raw_scores, dtype=np.float64)
    smoothed_scores = np.asarray(smoothed_scores, dtype=np.float64)
    truth = np.asarray(truth, dtype=np.int64)
    if not (len(raw_scores) == len(smoothed_scores) == len(truth)):
        raise MetricError(
            f"series lengths differ: raw={len(raw_scores)}, "
            f"smoothed={len(smoothed_scores)}, truth={len(truth)}"
        )
    return FoldResult(
        fold_index=fold_index,
        test_patients=tuple(test_patients),
        n_blocks=len(truth),
        n_positive=int(truth.sum()),
        raw=_score_series(raw_scores, truth, threshold, f"fold {fold_index} raw"),
        smoothed=_score_series(smoothed_scores, truth, threshold, f"fold {fold_index} smoothed"),
    )


def aggregate(folds: list[FoldResult]) -> dict:
    """Fold-level mean and sample std for every metric, skipping nulls."""
    out: dict = {}
    for series in ("raw", "smoothed"):
        stats = {}
        for name in METRIC_NAMES:
            values = [getattr(getattr(f, series), name) for f in folds]
            values = [v for v in values if v is not None]
            if values:
                stats[name] = {
                    "mean": float(np.mean(values)),
                    "std": float(np.std(values, ddof=1)) if len(values) > 1 else 0.0,
                    "n_folds": len(values),
                }
            else:
                stats[name] = {"mean": None, "std": None, "n_folds": 0}
        out[series] = stats
    return out


@dataclass
class EvalReport:
    folds: list[FoldResult]
    aggregates: dict
    threshold: float
    fold_plan: FoldPlan
    flops: dict
    provenance: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "threshold": self.threshold,
            "folds": [f.to_json() for f in self.folds],
            "aggregates": self.aggregates,
            "fold_plan": self.fold_plan.to_json(),
            "flops": self.flops,
            "provenance": self.provenance,
        }

    def save_json(self, path: str | Path) -> None:
        atomic_write_text(path, json.dumps(self.to_json(), indent=2) + "\n")

    def save_fold_csv(self, path: str | Path) -> None:
        lines = ["fold,series," + ",".join(METRIC_NAMES)]
        for fold in self.folds:
            for series in ("raw", "smoothed"):
                metrics = getattr(fold, series)
                cells = [str(fold.fold_index), series]
                for name in METRIC_NAMES:
                    value = getattr(metrics, name)
                    cells.append("" if value is None else f"{value:.6f}")
                lines.append(",".join(cells))
        atomic_write_text(path, "\n".join(lines) + "\n")


def build_report(
    folds: list[FoldResult],
    threshold: float,
    fold_plan: FoldPlan,
    flops: dict,
    provenance: dict | None = None,
) -> EvalReport:
    return EvalReport(
        folds=folds,
        aggregates=aggregate(folds),
        threshold=threshold,
        fold_plan=fold_plan,
        flops=flops,
        provenance=provenance or {},
    )


def write_roc_csv(path: str | Path, scores: np.ndarray, truth: np.ndarray) -> None:
    fpr, tpr = roc_points(scores, truth)
    lines = ["fpr,tpr"] + [f"{float(x)!r},{float(y)!r}" for x, y in zip(fpr, tpr)]
    atomic_write_text(path, "\n".join(lines) + "\n")


def write_pr_csv(path: str | Path, scores: np.ndarray, truth: np.ndarray) -> None:
    recall, precision = pr_points(scores, truth)
    lines = ["recall,precision"] + [
        f"{float(x)!r},{float(y)!r}" for x, y in zip(recall, precision)
    ]
    atomic_write_text(path, "\n".join(lines) + "\n")


def validate_report_dict(report: dict) -> None:
    """Structural check for emitted report JSON; raises ValueError on defects."""
    for key in ("threshold", "folds", "aggregates", "fold_plan", "flops", "provenance"):
        if key not in report:
            raise ValueError(f"report is missing key {key!r}")
    if not isinstance(report["folds"], list) or not report["folds"]:
        raise ValueError("report must contain at least one fold")
    for entry in report["folds"]:
        for key in ("fold", "test_patients", "n_blocks", "n_positive", "raw", "smoothed"):
            if key not in entry:
                raise ValueError(f"fold entry missing key {key!r}")
        for series in ("raw", "smoothed"):
            for name in METRIC_NAMES:
                if name not in entry[series]:
                    raise ValueError(f"fold {entry['fold']} {series} missing metric {name!r}")
                value = entry[series][name]
                if value is not None and not 0.0 <= value <= 1.0:
                    raise ValueError(f"metric {name} = {value} outside [0, 1]")
    for series in ("raw", "smoothed"):
        if series not in report["aggregates"]:
            raise ValueError(f"aggregates missing series {series!r}")
    if "folds" not in report["fold_plan"]:
        raise ValueError("fold_plan missing folds")
