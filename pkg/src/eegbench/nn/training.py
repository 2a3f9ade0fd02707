"""Seeded mini-batch trainer with validation-based early stopping.

Each epoch shuffles the training rows with the run's generator, steps an
adaptive first/second-moment optimizer over batches of 32, then scores the
validation split in eval mode. The parameter snapshot with the best
validation accuracy is restored at the end; training stops early after
`patience` epochs without improvement.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from eegbench.errors import TrainingDivergedError
from eegbench.nn.networks import predict_proba
from eegbench.nn.tensor import softmax_cross_entropy


@dataclass
class TrainConfig:
    batch_size: int = 32
    max_epochs: int = 100
    step_size: float = 1e-3
    patience: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.patience < 1:
            raise ValueError("patience must be >= 1")


@dataclass
class EpochStats:
    epoch: int
    train_loss: float
    val_accuracy: float


class AdamOptimizer:
    """Per-parameter first/second-moment steps with bias correction."""

    def __init__(self, params, step_size: float = 1e-3, beta1: float = 0.9,
                 beta2: float = 0.999, eps: float = 1e-8):
        self.params = list(params)
        self.step_size = step_size
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = [np.zeros_like(p.values) for p in self.params]
        self.v = [np.zeros_like(p.values) for p in self.params]

    def step(self):
        self.t += 1
        correction1 = 1.0 - self.beta1 ** self.t
        correction2 = 1.0 - self.beta2 ** self.t
        for p, m, v in zip(self.params, self.m, self.v):
            m *= self.beta1
            m += (1.0 - self.beta1) * p.grad
            v *= self.beta2
            v += (1.0 - self.beta2) * p.grad * p.grad
            p.values -= self.step_size * (m / correction1) / (
                np.sqrt(v / correction2) + self.eps
            )

    def zero_grad(self):
        for p in self.params:
            p.zero_grad()


@dataclass
class TrainResult:
    history: list[EpochStats] = field(default_factory=list)
    best_epoch: int | None = None
    best_val_accuracy: float | None = None


def _snapshot(params) -> list[np.ndarray]:
    return [p.values.copy() for p in params]


def _restore(params, snapshot) -> None:
    for p, values in zip(params, snapshot):
        p.values[...] = values


def train_network(
    network,
    X_train: np.ndarray,
    y_train: np.ndarray,
    X_val: np.ndarray,
    y_val: np.ndarray,
    config: TrainConfig,
    sample_weight: np.ndarray | None = None,
) -> TrainResult:
    """Fit in place; y_* are 0-based class indices."""
    X_train = np.asarray(X_train, dtype=np.float64)
    y_train = np.asarray(y_train, dtype=np.int64)
    weights = (
        np.ones(len(y_train)) if sample_weight is None else np.asarray(sample_weight, np.float64)
    )
    rng = np.random.default_rng(config.seed)
    params = network.parameters()
    optimizer = AdamOptimizer(params, step_size=config.step_size)
    result = TrainResult()
    best = _snapshot(params)
    best_accuracy = -np.inf
    stale = 0
    for epoch in range(config.max_epochs):
        order = rng.permutation(len(y_train))
        total_loss = 0.0
        for start in range(0, len(order), config.batch_size):
            batch = order[start : start + config.batch_size]
            optimizer.zero_grad()
            logits = network.forward(X_train[batch], training=True, rng=rng)
            loss, _ = softmax_cross_entropy(logits, y_train[batch], weights[batch])
            loss_value = float(loss.values)
            if not np.isfinite(loss_value):
                raise TrainingDivergedError(f"non-finite loss at epoch {epoch}")
            loss.backward()
            optimizer.step()
            total_loss += loss_value * len(batch)
        val_proba = predict_proba(network, X_val)
        val_accuracy = float(np.mean(val_proba.argmax(axis=1) == y_val))
        result.history.append(
            EpochStats(epoch=epoch, train_loss=total_loss / len(order), val_accuracy=val_accuracy)
        )
        if val_accuracy > best_accuracy:
            best_accuracy = val_accuracy
            best = _snapshot(params)
            result.best_epoch = epoch
            stale = 0
        else:
            stale += 1
            if stale >= config.patience:
                break
    _restore(params, best)
    result.best_val_accuracy = None if best_accuracy == -np.inf else best_accuracy
    return result


def export_history_csv(history: list[EpochStats], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch", "train_loss", "val_accuracy"])
        for row in history:
            writer.writerow([row.epoch, repr(row.train_loss), repr(row.val_accuracy)])


def tune_kernel_sizes(
    num_classes: int,
    candidates: list[tuple[int, int]],
    X_train: np.ndarray,
    y_train: np.ndarray,
    X_val: np.ndarray,
    y_val: np.ndarray,
    config: TrainConfig,
    seed: int = 0,
) -> tuple[int, int]:
    """Pick the CNN kernel pair with the best validation accuracy after a
    short training run; ties keep the earlier candidate."""
    from eegbench.nn.networks import build_cnn

    best_pair, best_accuracy = None, -np.inf
    for pair in candidates:
        net = build_cnn(num_classes, kernel_sizes=pair, seed=seed)
        result = train_network(net, X_train, y_train, X_val, y_val, config)
        accuracy = result.best_val_accuracy if result.best_val_accuracy is not None else -np.inf
        if accuracy > best_accuracy:
            best_accuracy = accuracy
            best_pair = pair
    return best_pair
