"""Gradient-boosted decision trees on log-odds.

Binary: start from the logit of the (weighted) base rate, then each round
fits a weighted squared-error regression tree to the log-loss residual
y - sigmoid(F(x)) and adds learning_rate times the tree. Multiclass keeps
one additive ensemble per class with softmax coupling and residuals
onehot_k - softmax_k(F). Trees scan all features, so given the same data
the first m rounds of any longer run coincide with an m-round model.
"""

from __future__ import annotations

import numpy as np

from eegbench.errors import TrainingDivergedError
from eegbench.models.base import Classifier, encode_labels
from eegbench.models.linear import sigmoid
from eegbench.models.tree import DecisionTree

_CLIP = 1e-12


def _softmax(F: np.ndarray) -> np.ndarray:
    shifted = F - F.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


class GbdtModel(Classifier):
    def __init__(
        self,
        learning_rate: float = 0.1,
        n_rounds: int = 100,
        max_depth: int = 3,
        seed: int = 0,
    ):
        if n_rounds < 1:
            raise ValueError("n_rounds must be >= 1")
        self.learning_rate = learning_rate
        self.n_rounds = n_rounds
        self.max_depth = max_depth
        self.seed = seed  # kept for manifest symmetry; the fit is deterministic
        self.classes_ = None
        self.base_scores_ = None  # (n_ensembles,)
        self.trees_ = None  # list of rounds, each a list of per-ensemble trees
        self.loss_history_ = None  # weighted training log-loss after each round

    def _fit_tree(self, X, residual, weights):
        tree = DecisionTree("regress", max_depth=self.max_depth)
        return tree.fit(X, residual, sample_weight=weights)

    def fit(self, X: np.ndarray, y: np.ndarray, sample_weight: np.ndarray | None = None):
        X = np.asarray(X, dtype=np.float64)
        self.classes_, y_idx = encode_labels(y)
        n = X.shape[0]
        w = np.ones(n) if sample_weight is None else np.asarray(sample_weight, np.float64)
        w_total = w.sum()
        binary = len(self.classes_) == 2
        if binary:
            target = (y_idx == 1).astype(np.float64)
            p0 = float(np.clip((w * target).sum() / w_total, _CLIP, 1 - _CLIP))
            self.base_scores_ = np.asarray([np.log(p0 / (1.0 - p0))])
            F = np.full(n, self.base_scores_[0])
        else:
            onehot = np.zeros((n, len(self.classes_)))
            onehot[np.arange(n), y_idx] = 1.0
            priors = np.clip((w[:, None] * onehot).sum(axis=0) / w_total, _CLIP, None)
            self.base_scores_ = np.log(priors)
            F = np.tile(self.base_scores_, (n, 1))

        self.trees_ = []
        self.loss_history_ = []
        for _ in range(self.n_rounds):
            if binary:
                p = sigmoid(F)
                residual = target - p
                if not np.all(np.isfinite(residual)):
                    raise TrainingDivergedError("non-finite boosting residuals")
                tree = self._fit_tree(X, residual, w)
                F = F + self.learning_rate * tree.predict_value(X)
                self.trees_.append([tree])
                p = np.clip(sigmoid(F), _CLIP, 1 - _CLIP)
                loss = -(w * (target * np.log(p) + (1 - target) * np.log(1 - p))).sum() / w_total
            else:
                p = _softmax(F)
                round_trees = []
                residuals = onehot - p
                if not np.all(np.isfinite(residuals)):
                    raise TrainingDivergedError("non-finite boosting residuals")
                for k in range(len(self.classes_)):
                    tree = self._fit_tree(X, residuals[:, k], w)
                    F[:, k] += self.learning_rate * tree.predict_value(X)
                    round_trees.append(tree)
                self.trees_.append(round_trees)
                p = np.clip(_softmax(F), _CLIP, None)
                loss = -(w * np.log(p[np.arange(n), y_idx])).sum() / w_total
            self.loss_history_.append(float(loss))
        return self

    def decision_function(self, X: np.ndarray, n_rounds: int | None = None) -> np.ndarray:
        """Additive log-odds after the first n_rounds rounds (default: all)."""
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        rounds = self.trees_ if n_rounds is None else self.trees_[:n_rounds]
        if len(self.classes_) == 2:
            F = np.full(X.shape[0], self.base_scores_[0])
            for (tree,) in rounds:
                F += self.learning_rate * tree.predict_value(X)
            return F
        F = np.tile(self.base_scores_, (X.shape[0], 1))
        for round_trees in rounds:
            for k, tree in enumerate(round_trees):
                F[:, k] += self.learning_rate * tree.predict_value(X)
        return F

    def predict_proba(self, X: np.ndarray, n_rounds: int | None = None) -> np.ndarray:
        F = self.decision_function(X, n_rounds)
        if len(self.classes_) == 2:
            p = sigmoid(F)
            return np.column_stack([1.0 - p, p])
        return _softmax(F)
