"""Random forest: bagged Gini trees with per-split feature subsampling.

Each tree trains on a seeded bootstrap of the full training size and draws
floor(sqrt(d)) candidate features at every split. Prediction averages the
per-tree leaf class-frequency vectors. Tree seeds are spawned from the
master seed, so results do not depend on how trees are scheduled.
"""

from __future__ import annotations

import numpy as np

from eegbench.models.base import Classifier, encode_labels
from eegbench.models.tree import DecisionTree
from eegbench.parallel import ordered_map, spawn_seeds


class RandomForestModel(Classifier):
    def __init__(
        self,
        n_estimators: int = 200,
        max_depth: int | None = None,
        seed: int = 0,
        feature_subset_size: int | None = None,
        bootstrap: bool = True,
    ):
        if n_estimators < 1:
            raise ValueError("n_estimators must be >= 1")
        self.n_estimators = n_estimators
        self.max_depth = max_depth
        self.seed = seed
        self.feature_subset_size = feature_subset_size
        self.bootstrap = bootstrap
        self.trees_ = None
        self.classes_ = None

    def fit(self, X: np.ndarray, y: np.ndarray) -> "RandomForestModel":
        X = np.asarray(X, dtype=np.float64)
        self.classes_, y_idx = encode_labels(y)
        n, d = X.shape
        subset = self.feature_subset_size or int(np.floor(np.sqrt(d)))
        seeds = spawn_seeds(self.seed, self.n_estimators)

        def fit_one(tree_seed: int) -> DecisionTree:
            rng = np.random.default_rng(tree_seed)
            rows = rng.integers(0, n, size=n) if self.bootstrap else np.arange(n)
            tree = DecisionTree("classify", self.max_depth, subset)
            return tree.fit(X[rows], y_idx[rows], rng=rng, n_classes=len(self.classes_))

        self.trees_ = ordered_map(fit_one, seeds)
        return self

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        total = np.zeros((X.shape[0], len(self.classes_)))
        for tree in self.trees_:
            total += tree.predict_value(X)
        return total / len(self.trees_)
