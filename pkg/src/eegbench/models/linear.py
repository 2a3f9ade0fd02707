"""Logistic regression and linear SVM, fitted one-vs-all by full-batch GD.

Both minimize mean weighted loss plus an L2 penalty on the weights:
logistic loss log(1 + exp(-y f(x))) or hinge loss max(0, 1 - y f(x)) with
y in {-1, +1} and f(x) = w.x + b. The fixed step size is chosen from a
small candidate list by final training loss; runs that go non-finite are
discarded, and if every candidate diverges the fit fails loudly.
"""

from __future__ import annotations

import numpy as np

from eegbench.errors import TrainingDivergedError
from eegbench.models.base import Classifier, encode_labels
from eegbench.parallel import ordered_map

STEP_SIZE_CANDIDATES = (1.0, 0.1, 0.01)


def sigmoid(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _run_gd(X, y_pm, weights, loss_kind, l2_lambda, step, max_epochs, tol):
    """One fixed-step descent; returns (w, b, losses) or None on divergence."""
    n, d = X.shape
    w = np.zeros(d)
    b = 0.0
    losses = []
    prev = np.inf
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(max_epochs):
            f = X @ w + b
            margins = y_pm * f
            if loss_kind == "logistic":
                # log(1 + exp(-m)) computed stably
                loss_terms = np.logaddexp(0.0, -margins)
                g = -y_pm * sigmoid(-margins)
            else:  # hinge
                loss_terms = np.maximum(0.0, 1.0 - margins)
                g = np.where(margins < 1.0, -y_pm, 0.0)
            loss = float(np.mean(weights * loss_terms) + l2_lambda * (w @ w))
            if not np.isfinite(loss):
                return None
            losses.append(loss)
            wg = weights * g
            grad_w = (X.T @ wg) / n + 2.0 * l2_lambda * w
            grad_b = float(np.mean(wg))
            w -= step * grad_w
            b -= step * grad_b
            if abs(prev - loss) < tol:
                break
            prev = loss
    if not (np.all(np.isfinite(w)) and np.isfinite(b)):
        return None
    return w, b, losses


class LinearModel(Classifier):
    def __init__(
        self,
        loss_kind: str = "logistic",
        l2_lambda: float = 1e-4,
        step_sizes: tuple = STEP_SIZE_CANDIDATES,
        max_epochs: int = 500,
        tol: float = 1e-8,
    ):
        if loss_kind not in ("logistic", "hinge"):
            raise ValueError(f"unknown loss kind {loss_kind!r}")
        self.loss_kind = loss_kind
        self.l2_lambda = l2_lambda
        self.step_sizes = tuple(step_sizes)
        self.max_epochs = max_epochs
        self.tol = tol
        self.classes_ = None
        self.weights_ = None  # (n_models, d)
        self.biases_ = None  # (n_models,)
        self.loss_history_ = None  # per fitted model, for the chosen step

    def _fit_binary(self, X, y_pm, weights):
        best = None
        for step in self.step_sizes:
            result = _run_gd(
                X, y_pm, weights, self.loss_kind, self.l2_lambda, step, self.max_epochs, self.tol
            )
            if result is None:
                continue
            if best is None or result[2][-1] < best[2][-1]:
                best = result
        if best is None:
            # The whole menu diverged (extreme l2_lambda makes the update
            # factor exceed 1); fall back to smaller decades before giving up.
            step = min(self.step_sizes) / 10.0
            while best is None and step >= 1e-12:
                best = _run_gd(
                    X, y_pm, weights, self.loss_kind, self.l2_lambda, step,
                    self.max_epochs, self.tol,
                )
                step /= 10.0
        if best is None:
            raise TrainingDivergedError(
                f"{self.loss_kind} fit diverged for every step size {self.step_sizes}"
            )
        return best

    def fit(self, X: np.ndarray, y: np.ndarray, sample_weight: np.ndarray | None = None):
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y)
        self.classes_, y_idx = encode_labels(y)
        if len(self.classes_) < 2:
            raise ValueError("need at least 2 classes")
        weights = (
            np.ones(X.shape[0]) if sample_weight is None else np.asarray(sample_weight, float)
        )
        if len(self.classes_) == 2:
            # Single model for the positive (higher-coded) class.
            targets = [np.where(y_idx == 1, 1.0, -1.0)]
        else:
            targets = [np.where(y_idx == c, 1.0, -1.0) for c in range(len(self.classes_))]
        fits = ordered_map(lambda t: self._fit_binary(X, t, weights), targets)
        self.weights_ = np.vstack([f[0] for f in fits])
        self.biases_ = np.asarray([f[1] for f in fits])
        self.loss_history_ = [f[2] for f in fits]
        return self

    def _activations(self, X: np.ndarray) -> np.ndarray:
        acts = X @ self.weights_.T + self.biases_
        if self.loss_kind == "hinge":
            # Signed margin: distance to the decision boundary.
            norms = np.linalg.norm(self.weights_, axis=1)
            acts = np.where(norms > 0, acts / np.where(norms > 0, norms, 1.0), acts)
        return acts

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        p = sigmoid(self._activations(X))
        if len(self.classes_) == 2:
            pos = p[:, 0]
            return np.column_stack([1.0 - pos, pos])
        return p / p.sum(axis=1, keepdims=True)
