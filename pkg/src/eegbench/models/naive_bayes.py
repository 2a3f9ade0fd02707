"""Gaussian naive Bayes with a relative variance floor.

Per-class, per-feature Gaussians with maximum-likelihood moments; posteriors
are computed in log space and normalized by log-sum-exp. Variances are
floored at 1e-9 times the pooled training variance so near-constant features
cannot produce singular likelihoods.
"""

from __future__ import annotations

import numpy as np

from eegbench.models.base import Classifier, encode_labels

VARIANCE_FLOOR_RATIO = 1e-9


class GaussianNbModel(Classifier):
    def __init__(self):
        self.classes_ = None
        self.log_priors_ = None  # (C,)
        self.means_ = None  # (C, d)
        self.variances_ = None  # (C, d)

    def fit(self, X: np.ndarray, y: np.ndarray) -> "GaussianNbModel":
        X = np.asarray(X, dtype=np.float64)
        self.classes_, y_idx = encode_labels(y)
        n_classes = len(self.classes_)
        floor = max(VARIANCE_FLOOR_RATIO * float(X.var()), np.finfo(np.float64).tiny)
        means = np.empty((n_classes, X.shape[1]))
        variances = np.empty((n_classes, X.shape[1]))
        priors = np.empty(n_classes)
        for c in range(n_classes):
            rows = X[y_idx == c]
            if rows.shape[0] < 2:
                raise ValueError(f"class {self.classes_[c]} has {rows.shape[0]} record(s); need >= 2")
            means[c] = rows.mean(axis=0)
            variances[c] = np.maximum(rows.var(axis=0), floor)
            priors[c] = rows.shape[0] / X.shape[0]
        self.log_priors_ = np.log(priors)
        self.means_ = means
        self.variances_ = variances
        return self

    def _joint_log_likelihood(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        jll = np.empty((X.shape[0], len(self.classes_)))
        for c in range(len(self.classes_)):
            diff = X - self.means_[c]
            jll[:, c] = self.log_priors_[c] - 0.5 * np.sum(
                np.log(2.0 * np.pi * self.variances_[c]) + diff * diff / self.variances_[c],
                axis=1,
            )
        return jll

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        jll = self._joint_log_likelihood(X)
        shifted = jll - jll.max(axis=1, keepdims=True)
        exp = np.exp(shifted)
        return exp / exp.sum(axis=1, keepdims=True)
