"""The three small networks: a two-block 1-D CNN and two-layer GRU/LSTM nets.

CNN: 1x178 input -> Conv(1->8, k1) -> ReLU -> MaxPool(2) -> Conv(8->16, k2)
-> ReLU -> MaxPool(2) -> flatten -> four dense layers tapering
128 -> 64 -> 32 -> num_classes with ReLU between.

RNN: the 178 samples as a scalar sequence -> recurrent layer (hidden 32) ->
dropout 0.5 -> second recurrent layer (hidden 32) -> last hidden state ->
Dense(32->16) -> ReLU -> Dense(16->num_classes).

Weights are Glorot-uniform (per gate block for the cells), forget-gate
biases start at 1, and every layer draws from a seed-spawned stream so a
network is a pure function of its seed.
"""

from __future__ import annotations

import numpy as np

from eegbench.nn import tensor as T
from eegbench.nn.recurrent import GruCell, LstmCell, glorot, gru_sequence, lstm_sequence
from eegbench.nn.tensor import Tensor

INPUT_LENGTH = 178
CNN_CHANNELS = (8, 16)
CNN_POOL = 2
CNN_FC_WIDTHS = (128, 64, 32)
DEFAULT_KERNEL_SIZES = (7, 5)
RNN_HIDDEN = 32
RNN_FC_WIDTH = 16
RNN_DROPOUT = 0.5


def _layer_rngs(seed: int, n: int) -> list[np.random.Generator]:
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n)]


class DenseLayer:
    def __init__(self, in_dim: int, out_dim: int, rng: np.random.Generator):
        self.w = Tensor(glorot(rng, in_dim, out_dim, (in_dim, out_dim)), requires_grad=True)
        self.b = Tensor(np.zeros(out_dim), requires_grad=True)

    def __call__(self, x: Tensor) -> Tensor:
        return T.add(T.matmul(x, self.w), self.b)

    def parameters(self):
        return [self.w, self.b]


class Conv1dLayer:
    def __init__(self, in_channels: int, out_channels: int, kernel_size: int,
                 rng: np.random.Generator):
        fan_in = in_channels * kernel_size
        fan_out = out_channels * kernel_size
        self.w = Tensor(
            glorot(rng, fan_in, fan_out, (out_channels, in_channels, kernel_size)),
            requires_grad=True,
        )
        self.b = Tensor(np.zeros(out_channels), requires_grad=True)
        self.kernel_size = kernel_size

    def __call__(self, x: Tensor) -> Tensor:
        return T.conv1d(x, self.w, self.b)

    def parameters(self):
        return [self.w, self.b]


class CnnNetwork:
    kind = "cnn"

    def __init__(self, num_classes: int, kernel_sizes: tuple = DEFAULT_KERNEL_SIZES,
                 seed: int = 0, input_length: int = INPUT_LENGTH):
        self.num_classes = num_classes
        self.kernel_sizes = tuple(kernel_sizes)
        self.seed = seed
        self.input_length = input_length
        self.classes_ = list(range(num_classes))
        k1, k2 = self.kernel_sizes
        length = (input_length - k1 + 1) // CNN_POOL
        length = (length - k2 + 1) // CNN_POOL
        self.flat_dim = CNN_CHANNELS[1] * length
        rngs = _layer_rngs(seed, 6)
        self.conv1 = Conv1dLayer(1, CNN_CHANNELS[0], k1, rngs[0])
        self.conv2 = Conv1dLayer(CNN_CHANNELS[0], CNN_CHANNELS[1], k2, rngs[1])
        widths = (self.flat_dim,) + CNN_FC_WIDTHS + (num_classes,)
        self.dense = [
            DenseLayer(w_in, w_out, rng)
            for w_in, w_out, rng in zip(widths[:-1], widths[1:], rngs[2:])
        ]

    def forward(self, X: np.ndarray, training: bool = False,
                rng: np.random.Generator | None = None) -> Tensor:
        B = X.shape[0]
        x = Tensor(np.asarray(X, dtype=np.float64).reshape(B, 1, self.input_length))
        x = T.maxpool1d(T.relu(self.conv1(x)), CNN_POOL)
        x = T.maxpool1d(T.relu(self.conv2(x)), CNN_POOL)
        x = T.reshape(x, (B, self.flat_dim))
        for layer in self.dense[:-1]:
            x = T.relu(layer(x))
        return self.dense[-1](x)

    def parameters(self) -> list[Tensor]:
        params = self.conv1.parameters() + self.conv2.parameters()
        for layer in self.dense:
            params += layer.parameters()
        return params

    def named_parameters(self) -> list[tuple[str, Tensor]]:
        names = ["conv1.w", "conv1.b", "conv2.w", "conv2.b"]
        for i in range(len(self.dense)):
            names += [f"dense{i}.w", f"dense{i}.b"]
        return list(zip(names, self.parameters()))

    def hyperparameters(self) -> dict:
        return {
            "num_classes": self.num_classes,
            "kernel_sizes": list(self.kernel_sizes),
            "seed": self.seed,
            "input_length": self.input_length,
        }


class RnnNetwork:
    kind = "rnn"

    def __init__(self, cell_kind: str, num_classes: int, seed: int = 0,
                 input_length: int = INPUT_LENGTH, dropout_rate: float = RNN_DROPOUT):
        if cell_kind not in ("gru", "lstm"):
            raise ValueError(f"unknown cell kind {cell_kind!r}")
        self.kind = cell_kind
        self.num_classes = num_classes
        self.seed = seed
        self.input_length = input_length
        self.dropout_rate = dropout_rate
        self.classes_ = list(range(num_classes))
        rngs = _layer_rngs(seed, 4)
        cell_cls = GruCell if cell_kind == "gru" else LstmCell
        self.layer1 = cell_cls(1, RNN_HIDDEN, rngs[0])
        self.layer2 = cell_cls(RNN_HIDDEN, RNN_HIDDEN, rngs[1])
        self.head1 = DenseLayer(RNN_HIDDEN, RNN_FC_WIDTH, rngs[2])
        self.head2 = DenseLayer(RNN_FC_WIDTH, num_classes, rngs[3])
        self._sequence = gru_sequence if cell_kind == "gru" else lstm_sequence

    def forward(self, X: np.ndarray, training: bool = False,
                rng: np.random.Generator | None = None) -> Tensor:
        B = X.shape[0]
        x = Tensor(np.asarray(X, dtype=np.float64).reshape(B, self.input_length, 1))
        h = self._sequence(self.layer1, x)
        if training and rng is None:
            raise ValueError("training-mode forward needs an rng for dropout")
        h = T.dropout(h, self.dropout_rate, rng, training)
        h = self._sequence(self.layer2, h)
        h = T.last_step(h)
        return self.head2(T.relu(self.head1(h)))

    def parameters(self) -> list[Tensor]:
        return (
            self.layer1.parameters()
            + self.layer2.parameters()
            + self.head1.parameters()
            + self.head2.parameters()
        )

    def named_parameters(self) -> list[tuple[str, Tensor]]:
        names = []
        for prefix, cell in (("layer1", self.layer1), ("layer2", self.layer2)):
            names += [f"{prefix}.p{i}" for i in range(len(cell.parameters()))]
        names += ["head1.w", "head1.b", "head2.w", "head2.b"]
        return list(zip(names, self.parameters()))

    def hyperparameters(self) -> dict:
        return {
            "cell_kind": self.kind,
            "num_classes": self.num_classes,
            "seed": self.seed,
            "input_length": self.input_length,
            "dropout_rate": self.dropout_rate,
        }


def build_cnn(num_classes: int, kernel_sizes: tuple = DEFAULT_KERNEL_SIZES,
              seed: int = 0) -> CnnNetwork:
    return CnnNetwork(num_classes, kernel_sizes=kernel_sizes, seed=seed)


def build_rnn(kind: str, num_classes: int, seed: int = 0,
              dropout_rate: float = RNN_DROPOUT) -> RnnNetwork:
    return RnnNetwork(kind, num_classes, seed=seed, dropout_rate=dropout_rate)


def predict_proba(network, X: np.ndarray, batch_size: int = 256) -> np.ndarray:
    """Eval-mode probabilities, deterministic, in fixed-size batches."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    parts = []
    for start in range(0, X.shape[0], batch_size):
        logits = network.forward(X[start : start + batch_size], training=False).values
        shifted = logits - logits.max(axis=1, keepdims=True)
        exp = np.exp(shifted)
        parts.append(exp / exp.sum(axis=1, keepdims=True))
    return np.vstack(parts)


def network_to_dict(network, classes: list[int] | None = None) -> dict:
    return {
        "model_kind": network.kind,
        "hyperparameters": network.hyperparameters(),
        "classes": classes if classes is not None else network.classes_,
        "parameters": {name: p.values.tolist() for name, p in network.named_parameters()},
    }


def network_from_dict(d: dict):
    hyper = d["hyperparameters"]
    if d["model_kind"] == "cnn":
        net = CnnNetwork(
            hyper["num_classes"],
            kernel_sizes=tuple(hyper["kernel_sizes"]),
            seed=hyper["seed"],
            input_length=hyper["input_length"],
        )
    else:
        net = RnnNetwork(
            hyper["cell_kind"],
            hyper["num_classes"],
            seed=hyper["seed"],
            input_length=hyper["input_length"],
            dropout_rate=hyper["dropout_rate"],
        )
    for name, p in net.named_parameters():
        p.values[...] = np.asarray(d["parameters"][name], dtype=np.float64)
    net.classes_ = [int(c) for c in d["classes"]]
    return net
