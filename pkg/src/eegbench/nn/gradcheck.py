"""Central-difference gradient verification for graph ops."""

from __future__ import annotations

from typing import Callable

import numpy as np

from eegbench.nn.tensor import Tensor

EPSILON = 1e-5


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    """Elementwise |a-n| / max(|a|, |n|, 1); the max over all entries.

    The unit floor makes the measure behave like absolute error where both
    gradients are tiny and finite-difference noise dominates.
    """
    denom = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), 1.0)
    return float(np.max(np.abs(analytic - numeric) / denom))


def max_gradcheck_error(
    loss_fn: Callable[[], Tensor], params: list[Tensor], eps: float = EPSILON
) -> float:
    """Worst relative error between backward() and central differences.

    loss_fn must rebuild the graph from the params' current values on every
    call (any randomness inside must be re-seeded identically per call).
    """
    for p in params:
        p.zero_grad()
    loss = loss_fn()
    loss.backward()
    analytic = [p.grad.copy() for p in params]
    worst = 0.0
    for p, a_grad in zip(params, analytic):
        numeric = np.zeros_like(p.values)
        flat = p.values.reshape(-1)
        n_flat = numeric.reshape(-1)
        for i in range(flat.size):
            original = flat[i]
            flat[i] = original + eps
            up = float(loss_fn().values)
            flat[i] = original - eps
            down = float(loss_fn().values)
            flat[i] = original
            n_flat[i] = (up - down) / (2.0 * eps)
        worst = max(worst, relative_error(a_grad, numeric))
    return worst
