"""K-nearest-neighbors under Euclidean distance.

Scores are neighbor-label frequencies over the K closest training rows.
Equal distances resolve to the lower training index; when counts tie, the
label whose neighbors sit closer (smaller summed distance) wins.
"""

from __future__ import annotations

import numpy as np

from eegbench.errors import EmptyInputError
from eegbench.models.base import Classifier, encode_labels

_CHUNK = 512


class KnnModel(Classifier):
    def __init__(self, k: int = 5):
        if k < 1:
            raise ValueError("k must be >= 1")
        self.k = k
        self.X_ = None
        self.y_idx_ = None
        self.classes_ = None

    def fit(self, X: np.ndarray, y: np.ndarray) -> "KnnModel":
        X = np.asarray(X, dtype=np.float64)
        if X.shape[0] == 0:
            raise EmptyInputError("empty training set")
        if self.k > X.shape[0]:
            raise ValueError(f"k={self.k} exceeds training size {X.shape[0]}")
        self.classes_, self.y_idx_ = encode_labels(y)
        self.X_ = X
        self._train_sq = np.einsum("ij,ij->i", X, X)
        return self

    def _neighbors(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(indices, distances) of the K nearest training rows per query."""
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        idx_parts, dist_parts = [], []
        for start in range(0, X.shape[0], _CHUNK):
            chunk = X[start : start + _CHUNK]
            sq = (
                np.einsum("ij,ij->i", chunk, chunk)[:, None]
                - 2.0 * chunk @ self.X_.T
                + self._train_sq[None, :]
            )
            np.maximum(sq, 0.0, out=sq)
            # Stable sort: equal distances keep the lower training index.
            order = np.argsort(sq, axis=1, kind="stable")[:, : self.k]
            idx_parts.append(order)
            dist_parts.append(np.sqrt(np.take_along_axis(sq, order, axis=1)))
        return np.vstack(idx_parts), np.vstack(dist_parts)

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        neighbors, _ = self._neighbors(X)
        n_queries = neighbors.shape[0]
        scores = np.zeros((n_queries, len(self.classes_)), dtype=np.float64)
        np.add.at(scores, (np.repeat(np.arange(n_queries), self.k), self.y_idx_[neighbors.ravel()]), 1.0)
        return scores / self.k

    def predict(self, X: np.ndarray) -> np.ndarray:
        """Label prediction with the summed-distance tie-break on counts."""
        neighbors, dists = self._neighbors(X)
        labels = np.empty(neighbors.shape[0], dtype=np.int64)
        classes = np.asarray(self.classes_)
        for i in range(neighbors.shape[0]):
            neigh_classes = self.y_idx_[neighbors[i]]
            counts = np.bincount(neigh_classes, minlength=len(self.classes_))
            best = np.flatnonzero(counts == counts.max())
            if best.size > 1:
                sums = np.array(
                    [dists[i][neigh_classes == c].sum() for c in best], dtype=np.float64
                )
                best = best[np.flatnonzero(sums == sums.min())]
            labels[i] = classes[best[0]]
        return labels
