"""A small reverse-mode tensor: float64 values plus an accumulated gradient.

Ops build a DAG of tensors; ``backward()`` on a scalar loss walks the graph
in reverse topological order, each node adding into its parents' grad
buffers. Gradients are exact (max pooling routes to the stored argmax,
first winner on ties), and the whole engine is single-threaded numpy, so
identical seeds give bit-identical training trajectories.
"""

from __future__ import annotations

import numpy as np


class Tensor:
    __slots__ = ("values", "grad", "requires_grad", "_parents", "_backward_fn")

    def __init__(self, values, requires_grad: bool = False):
        self.values = np.asarray(values, dtype=np.float64)
        self.requires_grad = requires_grad
        self.grad = np.zeros_like(self.values) if requires_grad else None
        self._parents: tuple = ()
        self._backward_fn = None

    @property
    def shape(self):
        return self.values.shape

    def zero_grad(self):
        if self.grad is not None:
            self.grad[...] = 0.0

    def backward(self):
        """Accumulate gradients of this scalar into every ancestor."""
        if self.values.size != 1:
            raise ValueError("backward() expects a scalar loss tensor")
        order = _toposort(self)
        if self.grad is None:
            self.grad = np.zeros_like(self.values)
        self.grad[...] = 1.0
        for node in reversed(order):
            if node._backward_fn is not None:
                node._backward_fn(node.grad)

    def __repr__(self):
        return f"Tensor(shape={self.values.shape}, requires_grad={self.requires_grad})"


def _toposort(root: Tensor) -> list[Tensor]:
    # Iterative DFS: step-op chains over 178 timesteps overflow recursion.
    order: list[Tensor] = []
    seen: set[int] = set()
    stack: list[tuple[Tensor, bool]] = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for parent in node._parents:
            if id(parent) not in seen:
                stack.append((parent, False))
    return order


def make_op(values: np.ndarray, parents: tuple, backward_fn) -> Tensor:
    """Graph node: tracks gradients iff any parent does."""
    out = Tensor(values, requires_grad=any(p.requires_grad for p in parents))
    if out.requires_grad:
        out._parents = parents
        out._backward_fn = backward_fn
    return out


def _unbroadcast(grad: np.ndarray, shape: tuple) -> np.ndarray:
    """Sum a broadcast gradient back down to the original shape."""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


def _accumulate(parent: Tensor, grad: np.ndarray):
    if parent.requires_grad:
        parent.grad += _unbroadcast(grad, parent.values.shape)


def add(a: Tensor, b: Tensor) -> Tensor:
    def backward(grad):
        _accumulate(a, grad)
        _accumulate(b, grad)

    return make_op(a.values + b.values, (a, b), backward)


def sub(a: Tensor, b: Tensor) -> Tensor:
    def backward(grad):
        _accumulate(a, grad)
        _accumulate(b, -grad)

    return make_op(a.values - b.values, (a, b), backward)


def mul(a: Tensor, b: Tensor) -> Tensor:
    def backward(grad):
        _accumulate(a, grad * b.values)
        _accumulate(b, grad * a.values)

    return make_op(a.values * b.values, (a, b), backward)


def matmul(a: Tensor, b: Tensor) -> Tensor:
    def backward(grad):
        _accumulate(a, grad @ b.values.T)
        _accumulate(b, a.values.T @ grad)

    return make_op(a.values @ b.values, (a, b), backward)


def relu(x: Tensor) -> Tensor:
    mask = x.values > 0

    def backward(grad):
        _accumulate(x, grad * mask)

    return make_op(np.where(mask, x.values, 0.0), (x,), backward)


def sigmoid(x: Tensor) -> Tensor:
    s = _sigmoid_values(x.values)

    def backward(grad):
        _accumulate(x, grad * s * (1.0 - s))

    return make_op(s, (x,), backward)


def tanh(x: Tensor) -> Tensor:
    t = np.tanh(x.values)

    def backward(grad):
        _accumulate(x, grad * (1.0 - t * t))

    return make_op(t, (x,), backward)


def _sigmoid_values(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def sum_all(x: Tensor) -> Tensor:
    def backward(grad):
        if x.requires_grad:
            x.grad += grad  # scalar broadcasts over the whole buffer

    return make_op(np.asarray(x.values.sum()), (x,), backward)


def reshape(x: Tensor, shape: tuple) -> Tensor:
    original = x.values.shape

    def backward(grad):
        _accumulate(x, grad.reshape(original))

    return make_op(x.values.reshape(shape), (x,), backward)


def slice_cols(x: Tensor, start: int, stop: int) -> Tensor:
    """Columns [start:stop) of a 2-D tensor."""

    def backward(grad):
        if x.requires_grad:
            x.grad[:, start:stop] += grad

    return make_op(x.values[:, start:stop], (x,), backward)


def last_step(x: Tensor) -> Tensor:
    """Final timestep of a (batch, time, features) tensor."""

    def backward(grad):
        if x.requires_grad:
            x.grad[:, -1, :] += grad

    return make_op(x.values[:, -1, :], (x,), backward)


def conv1d(x: Tensor, weights: Tensor, bias: Tensor) -> Tensor:
    """Valid cross-correlation: out[b,o,t] = bias[o] + sum w[o,c,k] x[b,c,t+k]."""
    B, C, L = x.values.shape
    O, C_w, K = weights.values.shape
    if C != C_w:
        raise ValueError(f"channel mismatch: input {C}, kernel {C_w}")
    if L < K:
        raise ValueError(f"input length {L} shorter than kernel {K}")
    windows = np.lib.stride_tricks.sliding_window_view(x.values, K, axis=2)  # (B,C,Lo,K)
    out = np.einsum("bctk,ock->bot", windows, weights.values) + bias.values[None, :, None]

    def backward(grad):
        if weights.requires_grad:
            weights.grad += np.einsum("bot,bctk->ock", grad, windows)
        if bias.requires_grad:
            bias.grad += grad.sum(axis=(0, 2))
        if x.requires_grad:
            padded = np.pad(grad, ((0, 0), (0, 0), (K - 1, K - 1)))
            gwin = np.lib.stride_tricks.sliding_window_view(padded, K, axis=2)  # (B,O,L,K)
            x.grad += np.einsum("bolk,ock->bcl", gwin, weights.values[:, :, ::-1])

    return make_op(out, (x, weights, bias), backward)


def maxpool1d(x: Tensor, window: int) -> Tensor:
    """Non-overlapping max pooling; a trailing remainder is dropped."""
    B, C, L = x.values.shape
    if L < window:
        raise ValueError(f"input length {L} shorter than pooling window {window}")
    n_out = L // window
    trimmed = x.values[:, :, : n_out * window].reshape(B, C, n_out, window)
    argmax = trimmed.argmax(axis=3)  # first max on ties
    out = np.take_along_axis(trimmed, argmax[..., None], axis=3)[..., 0]

    def backward(grad):
        if x.requires_grad:
            b_idx, c_idx, t_idx = np.indices(out.shape)
            x.grad[b_idx, c_idx, t_idx * window + argmax] += grad

    return make_op(out, (x,), backward)


def dropout(x: Tensor, rate: float, rng: np.random.Generator, training: bool) -> Tensor:
    """Inverted dropout: scale retained units by 1/(1-rate) at train time."""
    if not 0.0 <= rate < 1.0:
        raise ValueError(f"dropout rate must be in [0, 1), got {rate}")
    if not training or rate == 0.0:
        return x
    scale = 1.0 / (1.0 - rate)
    mask = (rng.random(x.values.shape) >= rate) * scale

    def backward(grad):
        _accumulate(x, grad * mask)

    return make_op(x.values * mask, (x,), backward)


def softmax_cross_entropy(
    logits: Tensor, labels: np.ndarray, sample_weights: np.ndarray | None = None
) -> tuple[Tensor, np.ndarray]:
    """Mean weighted cross-entropy over the batch, plus the probabilities.

    Softmax subtracts the row max for stability; per-sample loss is
    -weight * log p[label].
    """
    labels = np.asarray(labels, dtype=np.int64)
    B = logits.values.shape[0]
    w = np.ones(B) if sample_weights is None else np.asarray(sample_weights, np.float64)
    shifted = logits.values - logits.values.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    probs = exp / exp.sum(axis=1, keepdims=True)
    log_probs = shifted - np.log(exp.sum(axis=1, keepdims=True))
    loss_value = -(w * log_probs[np.arange(B), labels]).sum() / B

    def backward(grad):
        if logits.requires_grad:
            delta = probs.copy()
            delta[np.arange(B), labels] -= 1.0
            logits.grad += grad * w[:, None] * delta / B

    loss = make_op(np.asarray(loss_value), (logits,), backward)
    return loss, probs
