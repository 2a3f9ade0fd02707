"""Voltage scaling, task relabeling, stratified splits and class weights.

All partitioning here is deterministic given (labels, seed): within each
class, indices are shuffled by one seeded generator and then cut (splits) or
dealt round-robin (folds). Scaling is a single global min-max map fitted on
training voltages only; the 178 positions are homogeneous samples of one
waveform, so one (v_min, v_max) pair serves all of them.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from eegbench.dataset import ClassLabel
from eegbench.errors import EmptyInputError, StratificationError

POSITIVE_LABEL = 1  # binary task: seizure
NEGATIVE_LABEL = 0


class TaskKind(enum.Enum):
    BINARY = "binary"
    MULTICLASS = "multiclass"

    @property
    def class_codes(self) -> list[int]:
        if self is TaskKind.BINARY:
            return [NEGATIVE_LABEL, POSITIVE_LABEL]
        return [label.value for label in ClassLabel]

    @property
    def class_names(self) -> list[str]:
        if self is TaskKind.BINARY:
            return ["NonSeizure", "Seizure"]
        return [label.display_name for label in ClassLabel]


@dataclass(frozen=True)
class ScalerParams:
    """Global voltage extremes of the training set."""

    v_min: float
    v_max: float

    def __post_init__(self):
        if not (np.isfinite(self.v_min) and np.isfinite(self.v_max)):
            raise ValueError("scaler bounds must be finite")
        if self.v_min > self.v_max:
            raise ValueError("v_min exceeds v_max")


def fit_minmax(samples: np.ndarray) -> ScalerParams:
    """Global min/max over every voltage of every training record."""
    if samples.size == 0:
        raise EmptyInputError("cannot fit scaler on an empty training set")
    return ScalerParams(float(samples.min()), float(samples.max()))


def apply_minmax(params: ScalerParams, samples: np.ndarray) -> np.ndarray:
    """Map voltages onto [-1, 1]: x -> 2(x - v_min)/(v_max - v_min) - 1.

    A degenerate range maps everything to 0. Values outside the fitted
    range extrapolate linearly; they are not clipped.
    """
    span = params.v_max - params.v_min
    if span == 0.0:
        return np.zeros_like(samples, dtype=np.float64)
    return 2.0 * (np.asarray(samples, dtype=np.float64) - params.v_min) / span - 1.0


def relabel(labels: np.ndarray, task: TaskKind) -> np.ndarray:
    """Task view of the activity labels: binary folds everything but seizure
    into one negative class; multiclass keeps the five codes."""
    labels = np.asarray(labels)
    if task is TaskKind.MULTICLASS:
        return labels.copy()
    return np.where(labels == ClassLabel.SEIZURE.value, POSITIVE_LABEL, NEGATIVE_LABEL).astype(
        labels.dtype
    )


@dataclass(frozen=True)
class SplitPlan:
    """Index-level train/test partition, stratified by label."""

    train_indices: np.ndarray
    test_indices: np.ndarray
    seed: int
    ratio: float

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "ratio": self.ratio,
            "train_indices": sorted(int(i) for i in self.train_indices),
            "test_indices": sorted(int(i) for i in self.test_indices),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SplitPlan":
        return cls(
            train_indices=np.asarray(d["train_indices"], dtype=np.int64),
            test_indices=np.asarray(d["test_indices"], dtype=np.int64),
            seed=int(d["seed"]),
            ratio=float(d["ratio"]),
        )


@dataclass(frozen=True)
class FoldPlan:
    """K disjoint validation folds over a set of training indices."""

    folds: list[np.ndarray]
    k: int

    def round(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        """(fit_indices, validation_indices) for CV round i."""
        val = self.folds[i]
        fit = np.concatenate([f for j, f in enumerate(self.folds) if j != i])
        return np.sort(fit), val

    def to_dict(self) -> dict:
        return {"k": self.k, "folds": [sorted(int(i) for i in f) for f in self.folds]}

    @classmethod
    def from_dict(cls, d: dict) -> "FoldPlan":
        return cls(folds=[np.asarray(f, dtype=np.int64) for f in d["folds"]], k=int(d["k"]))


def stratified_split(labels: np.ndarray, ratio: float, seed: int) -> SplitPlan:
    """Deterministic stratified train/test split.

    Per-class train counts are ratio * count rounded to nearest, adjusted so
    every class lands on both sides; a class with fewer than 2 records
    cannot satisfy that and raises StratificationError.
    """
    if not 0.0 < ratio < 1.0:
        raise ValueError(f"ratio must be in (0, 1), got {ratio}")
    labels = np.asarray(labels)
    rng = np.random.default_rng(seed)
    train_parts, test_parts = [], []
    for value in np.unique(labels):
        indices = np.flatnonzero(labels == value)
        if indices.size < 2:
            raise StratificationError(
                f"class {value} has {indices.size} record(s); need at least 2 to stratify"
            )
        shuffled = rng.permutation(indices)
        n_train = int(np.floor(ratio * indices.size + 0.5))
        n_train = min(max(n_train, 1), indices.size - 1)
        train_parts.append(shuffled[:n_train])
        test_parts.append(shuffled[n_train:])
    return SplitPlan(
        train_indices=np.sort(np.concatenate(train_parts)),
        test_indices=np.sort(np.concatenate(test_parts)),
        seed=seed,
        ratio=ratio,
    )


def kfold_stratified(train_indices: np.ndarray, labels: np.ndarray, k: int, seed: int) -> FoldPlan:
    """Deterministic stratified K-fold plan over the training indices.

    Within each class the shuffled indices are dealt round-robin across
    folds, so per-class fold counts differ by at most one.
    """
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    train_indices = np.asarray(train_indices)
    train_labels = np.asarray(labels)[train_indices]
    rng = np.random.default_rng(seed)
    folds: list[list[int]] = [[] for _ in range(k)]
    for value in np.unique(train_labels):
        class_indices = train_indices[train_labels == value]
        if class_indices.size < k:
            raise StratificationError(
                f"class {value} has {class_indices.size} training record(s); need >= {k} for {k}-fold"
            )
        shuffled = rng.permutation(class_indices)
        for i, idx in enumerate(shuffled):
            folds[i % k].append(int(idx))
    return FoldPlan(folds=[np.sort(np.asarray(f, dtype=np.int64)) for f in folds], k=k)


def class_weights(labels: np.ndarray) -> dict[int, float]:
    """Inverse-frequency weights: weight(c) = N / (num_classes * count(c))."""
    labels = np.asarray(labels)
    values, counts = np.unique(labels, return_counts=True)
    n = labels.size
    return {int(v): n / (len(values) * int(c)) for v, c in zip(values, counts)}


def sample_weights(labels: np.ndarray, weights: dict[int, float] | None) -> np.ndarray:
    """Per-record weight vector from a class-weight map (None -> all ones)."""
    labels = np.asarray(labels)
    if weights is None:
        return np.ones(labels.size, dtype=np.float64)
    return np.asarray([weights[int(y)] for y in labels], dtype=np.float64)
