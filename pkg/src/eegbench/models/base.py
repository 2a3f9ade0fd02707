"""Shared probabilistic-classifier contract."""

from __future__ import annotations

import abc

import numpy as np


class Classifier(abc.ABC):
    """Fit on labeled feature rows, emit per-class probability scores.

    ``classes_`` is the sorted list of class codes; ``predict_proba`` columns
    follow that order.
    """

    classes_: list[int]

    @abc.abstractmethod
    def fit(self, X: np.ndarray, y: np.ndarray) -> "Classifier":
        ...

    @abc.abstractmethod
    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        ...

    def predict(self, X: np.ndarray) -> np.ndarray:
        proba = self.predict_proba(X)
        classes = np.asarray(self.classes_)
        return classes[np.argmax(proba, axis=1)]


def check_proba(proba: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Assert the probability contract: entries in [0,1], rows sum to 1."""
    proba = np.asarray(proba)
    if np.any(proba < -tol) or np.any(proba > 1 + tol):
        raise ValueError("probability entries outside [0, 1]")
    sums = proba.sum(axis=-1)
    if np.any(np.abs(sums - 1.0) > tol):
        raise ValueError(f"probability rows do not sum to 1 (max err {np.abs(sums - 1).max():g})")
    return proba


def encode_labels(y: np.ndarray) -> tuple[list[int], np.ndarray]:
    """Sorted class codes and the 0-based index of each label."""
    classes = sorted(int(v) for v in np.unique(y))
    index = {c: i for i, c in enumerate(classes)}
    encoded = np.asarray([index[int(v)] for v in np.asarray(y)], dtype=np.int64)
    return classes, encoded
