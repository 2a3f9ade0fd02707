"""CART trees: Gini-impurity classification and squared-error regression.

Thresholds are midpoints between consecutive distinct sorted values of the
node's own samples, so a split never lands on an observed value. Growth
stops on a pure node, at max_depth, or when no candidate split reduces the
impurity. When feature_subset_size is set, each split considers only that
many randomly drawn candidate features (the random-forest rule).
"""

from __future__ import annotations

import numpy as np

_MIN_GAIN = 1e-12


def _scan_classification(x, y_idx, n_classes):
    """Best (gain, threshold) of one feature for Gini; None without a cut."""
    order = np.argsort(x, kind="stable")
    xs = x[order]
    boundaries = np.flatnonzero(xs[1:] > xs[:-1])
    if boundaries.size == 0:
        return None
    onehot = np.zeros((x.size, n_classes))
    onehot[np.arange(x.size), y_idx[order]] = 1.0
    cum = np.cumsum(onehot, axis=0)
    total = cum[-1]
    n = x.size
    left_counts = cum[boundaries]
    n_left = boundaries + 1.0
    n_right = n - n_left
    right_counts = total - left_counts
    gini_left = 1.0 - np.sum((left_counts / n_left[:, None]) ** 2, axis=1)
    gini_right = 1.0 - np.sum((right_counts / n_right[:, None]) ** 2, axis=1)
    parent = 1.0 - np.sum((total / n) ** 2)
    weighted = (n_left * gini_left + n_right * gini_right) / n
    gains = parent - weighted
    thresholds = 0.5 * (xs[boundaries] + xs[boundaries + 1])
    valid = thresholds > xs[boundaries]  # guard against 1-ulp gaps
    if not valid.any():
        return None
    gains = np.where(valid, gains, -np.inf)
    best = int(np.argmax(gains))
    return float(gains[best]), float(thresholds[best])


def _scan_regression(x, residuals, weights):
    """Best (gain, threshold) of one feature for weighted squared error."""
    order = np.argsort(x, kind="stable")
    xs = x[order]
    boundaries = np.flatnonzero(xs[1:] > xs[:-1])
    if boundaries.size == 0:
        return None
    r = residuals[order]
    w = weights[order]
    w_cum = np.cumsum(w)
    wr_cum = np.cumsum(w * r)
    wr2_cum = np.cumsum(w * r * r)
    w_tot, wr_tot, wr2_tot = w_cum[-1], wr_cum[-1], wr2_cum[-1]
    wl = w_cum[boundaries]
    wrl = wr_cum[boundaries]
    wr2l = wr2_cum[boundaries]
    wr_ = wr_tot - wrl
    w_r = w_tot - wl
    wr2r = wr2_tot - wr2l
    sse_left = wr2l - np.where(wl > 0, wrl * wrl / np.where(wl > 0, wl, 1.0), 0.0)
    sse_right = wr2r - np.where(w_r > 0, wr_ * wr_ / np.where(w_r > 0, w_r, 1.0), 0.0)
    parent = wr2_tot - (wr_tot * wr_tot / w_tot if w_tot > 0 else 0.0)
    gains = parent - (sse_left + sse_right)
    thresholds = 0.5 * (xs[boundaries] + xs[boundaries + 1])
    valid = thresholds > xs[boundaries]
    if not valid.any():
        return None
    gains = np.where(valid, gains, -np.inf)
    best = int(np.argmax(gains))
    return float(gains[best]), float(thresholds[best])


class DecisionTree:
    """A single CART tree.

    mode "classify" grows on Gini impurity and stores class-count leaves;
    mode "regress" grows on weighted squared error and stores weighted-mean
    leaves (the boosting residual fit).
    """

    def __init__(self, mode: str = "classify", max_depth: int | None = None,
                 feature_subset_size: int | None = None):
        if mode not in ("classify", "regress"):
            raise ValueError(f"unknown tree mode {mode!r}")
        self.mode = mode
        self.max_depth = max_depth
        self.feature_subset_size = feature_subset_size
        self.root = None
        self.n_classes = None

    def fit(self, X, y, sample_weight=None, rng=None, n_classes=None):
        X = np.asarray(X, dtype=np.float64)
        if X.shape[0] == 0:
            raise ValueError("empty training subset")
        if self.mode == "classify":
            y = np.asarray(y, dtype=np.int64)
            self.n_classes = n_classes if n_classes is not None else int(y.max()) + 1
            weights = None
        else:
            y = np.asarray(y, dtype=np.float64)
            weights = (
                np.ones(X.shape[0]) if sample_weight is None else np.asarray(sample_weight, float)
            )
        if self.feature_subset_size is not None and rng is None:
            rng = np.random.default_rng(0)
        self.root = self._build(X, y, weights, np.arange(X.shape[0]), 0, rng)
        return self

    def _leaf(self, y, weights, indices):
        if self.mode == "classify":
            counts = np.bincount(y[indices], minlength=self.n_classes)
            return {"counts": [int(c) for c in counts]}
        w = weights[indices]
        return {"value": float(np.average(y[indices], weights=w)) if w.sum() > 0 else 0.0}

    def _build(self, X, y, weights, indices, depth, rng):
        node_y = y[indices]
        if self.mode == "classify" and np.all(node_y == node_y[0]):
            return self._leaf(y, weights, indices)
        if self.max_depth is not None and depth >= self.max_depth:
            return self._leaf(y, weights, indices)
        n_features = X.shape[1]
        if self.feature_subset_size is not None and self.feature_subset_size < n_features:
            features = rng.choice(n_features, size=self.feature_subset_size, replace=False)
        else:
            features = np.arange(n_features)
        best_gain, best_feature, best_threshold = _MIN_GAIN, None, None
        for f in features:
            x = X[indices, f]
            if self.mode == "classify":
                found = _scan_classification(x, node_y, self.n_classes)
            else:
                found = _scan_regression(x, node_y, weights[indices])
            if found is not None and found[0] > best_gain:
                best_gain, best_threshold = found
                best_feature = int(f)
        if best_feature is None:
            return self._leaf(y, weights, indices)
        go_left = X[indices, best_feature] < best_threshold
        return {
            "feature": best_feature,
            "threshold": best_threshold,
            "left": self._build(X, y, weights, indices[go_left], depth + 1, rng),
            "right": self._build(X, y, weights, indices[~go_left], depth + 1, rng),
        }

    def _evaluate(self, X, node, indices, out):
        if "feature" not in node:
            if self.mode == "classify":
                counts = np.asarray(node["counts"], dtype=np.float64)
                out[indices] = counts / counts.sum()
            else:
                out[indices] = node["value"]
            return
        go_left = X[indices, node["feature"]] < node["threshold"]
        if go_left.any():
            self._evaluate(X, node["left"], indices[go_left], out)
        if not go_left.all():
            self._evaluate(X, node["right"], indices[~go_left], out)

    def predict_value(self, X: np.ndarray) -> np.ndarray:
        """Leaf class-frequency vectors (classify) or leaf means (regress)."""
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if self.mode == "classify":
            out = np.empty((X.shape[0], self.n_classes))
        else:
            out = np.empty(X.shape[0])
        self._evaluate(X, self.root, np.arange(X.shape[0]), out)
        return out

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "max_depth": self.max_depth,
            "feature_subset_size": self.feature_subset_size,
            "n_classes": self.n_classes,
            "root": self.root,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DecisionTree":
        tree = cls(d["mode"], d["max_depth"], d["feature_subset_size"])
        tree.n_classes = d["n_classes"]
        tree.root = d["root"]
        return tree
