"""Accuracy, binary ROC-AUC, per-class precision and run reports.

AUC uses the rank formulation (equivalent to counting concordant
positive/negative pairs with ties worth one half); precision of a class
that is never predicted is reported as 0.0 and flagged.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from eegbench.errors import UndefinedMetricError
from eegbench.preprocessing import TaskKind

TABLE_COLUMNS = ["Seizure", "TumorArea", "HealthArea", "EyesClosed", "EyesOpen"]


def predicted_labels(proba: np.ndarray, classes: list[int]) -> np.ndarray:
    """Argmax labels from per-class scores; ties go to the lowest class code."""
    proba = np.atleast_2d(np.asarray(proba, dtype=np.float64))
    classes = np.asarray(sorted(classes))
    return classes[np.argmax(proba, axis=1)]


def accuracy(predictions: np.ndarray, truths: np.ndarray) -> float:
    predictions = np.asarray(predictions)
    truths = np.asarray(truths)
    if predictions.shape != truths.shape:
        raise ValueError(f"length mismatch: {predictions.shape} vs {truths.shape}")
    if truths.size == 0:
        raise ValueError("cannot score zero records")
    return float(np.mean(predictions == truths))


def roc_auc(scores: np.ndarray, truths: np.ndarray) -> float:
    """Probability that a random positive outscores a random negative.

    Computed from average ranks in one sort, which equals pair counting
    with ties worth 0.5 and the trapezoidal area under the ROC curve.
    """
    scores = np.asarray(scores, dtype=np.float64)
    truths = np.asarray(truths)
    pos = truths == 1
    n_pos = int(pos.sum())
    n_neg = truths.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise UndefinedMetricError("AUC needs both classes present")
    order = np.argsort(scores, kind="stable")
    ranks = np.empty(scores.size, dtype=np.float64)
    ranks[order] = np.arange(1, scores.size + 1)
    # Average ranks within tie groups.
    sorted_scores = scores[order]
    i = 0
    while i < scores.size:
        j = i
        while j + 1 < scores.size and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        if j > i:
            ranks[order[i : j + 1]] = 0.5 * (i + 1 + j + 1)
        i = j + 1
    u = ranks[pos].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def confusion_matrix(truths: np.ndarray, predictions: np.ndarray, classes: list[int]) -> np.ndarray:
    """C x C count matrix; rows are true classes, columns predicted."""
    classes = sorted(classes)
    index = {c: i for i, c in enumerate(classes)}
    matrix = np.zeros((len(classes), len(classes)), dtype=np.int64)
    for t, p in zip(np.asarray(truths), np.asarray(predictions)):
        matrix[index[int(t)], index[int(p)]] += 1
    return matrix


def precision_per_class(confusion: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Column-wise precision TP/(TP+FP); never-predicted classes score 0.0.

    Returns (precisions, positions of classes whose precision was 0/0).
    """
    confusion = np.asarray(confusion, dtype=np.float64)
    predicted_totals = confusion.sum(axis=0)
    undefined = [i for i, s in enumerate(predicted_totals) if s == 0]
    with np.errstate(invalid="ignore", divide="ignore"):
        precision = np.where(predicted_totals > 0, np.diag(confusion) / predicted_totals, 0.0)
    return precision, undefined


def overall_accuracy(confusion: np.ndarray) -> float:
    """Micro accuracy: trace over total count."""
    confusion = np.asarray(confusion)
    total = confusion.sum()
    if total == 0:
        raise ValueError("empty confusion matrix")
    return float(np.trace(confusion) / total)


@dataclass
class MetricsReport:
    """All evaluation numbers for one (model, task) run."""

    task: TaskKind
    model_id: str
    seed: int
    accuracy: float
    auc: float | None  # binary task only
    precision: dict[str, float]  # class name -> precision
    confusion: np.ndarray
    class_names: list[str]
    undefined_precision: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "task": self.task.value,
            "model_id": self.model_id,
            "seed": self.seed,
            "accuracy": self.accuracy,
            "auc": self.auc,
            "precision": self.precision,
            "confusion": [[int(v) for v in row] for row in self.confusion],
            "class_names": list(self.class_names),
            "undefined_precision": list(self.undefined_precision),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> "MetricsReport":
        return cls(
            task=TaskKind(d["task"]),
            model_id=d["model_id"],
            seed=int(d["seed"]),
            accuracy=float(d["accuracy"]),
            auc=None if d["auc"] is None else float(d["auc"]),
            precision={k: float(v) for k, v in d["precision"].items()},
            confusion=np.asarray(d["confusion"], dtype=np.int64),
            class_names=list(d["class_names"]),
            undefined_precision=list(d["undefined_precision"]),
        )

    def table_row(self) -> list[str]:
        """Values in benchmark-table column order, 3 decimals."""
        cells = []
        for name in TABLE_COLUMNS:
            value = self.precision.get(name)
            cells.append("" if value is None else f"{value:.3f}")
        cells.append(f"{self.accuracy:.3f}")
        return cells


def compute_report(
    task: TaskKind,
    model_id: str,
    seed: int,
    proba: np.ndarray,
    truths: np.ndarray,
) -> MetricsReport:
    """Assemble the full report from per-class scores and true labels."""
    classes = task.class_codes
    preds = predicted_labels(proba, classes)
    confusion = confusion_matrix(truths, preds, classes)
    precision, undefined = precision_per_class(confusion)
    names = task.class_names
    auc = None
    if task is TaskKind.BINARY:
        positive_col = sorted(classes).index(1)
        auc = roc_auc(np.atleast_2d(proba)[:, positive_col], truths)
    return MetricsReport(
        task=task,
        model_id=model_id,
        seed=seed,
        accuracy=overall_accuracy(confusion),
        auc=auc,
        precision={name: float(p) for name, p in zip(names, precision)},
        confusion=confusion,
        class_names=names,
        undefined_precision=[names[i] for i in undefined],
    )
