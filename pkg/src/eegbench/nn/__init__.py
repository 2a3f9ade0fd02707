"""Minimal reverse-mode tensor engine and the small networks built on it."""

from eegbench.nn.tensor import Tensor
from eegbench.nn.networks import CnnNetwork, RnnNetwork, build_cnn, build_rnn
from eegbench.nn.training import AdamOptimizer, TrainConfig, train_network

__all__ = [
    "Tensor",
    "CnnNetwork",
    "RnnNetwork",
    "build_cnn",
    "build_rnn",
    "AdamOptimizer",
    "TrainConfig",
    "train_network",
]
