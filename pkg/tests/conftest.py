"""Shared fixtures: synthetic EEG-like datasets and CSV writers.

The synthetic generator produces per-class waveforms with distinct
amplitude/frequency signatures (the seizure class much larger, mimicking
the real recordings), so pipeline tests can assert better-than-chance
behavior without shipping the real data file.
"""

from __future__ import annotations

import numpy as np
import pytest

from eegbench.dataset import EegDataset, N_SAMPLES, save_csv

CLASS_AMPLITUDE = {1: 800.0, 2: 120.0, 3: 60.0, 4: 30.0, 5: 15.0}
CLASS_FREQ = {1: 9.0, 2: 5.0, 3: 3.0, 4: 11.0, 5: 2.0}


def make_synthetic_dataset(n_per_class: int = 40, seed: int = 0, noise: float = 5.0) -> EegDataset:
    rng = np.random.default_rng(seed)
    t = np.arange(N_SAMPLES) / N_SAMPLES
    ids, rows, labels = [], [], []
    for label in (1, 2, 3, 4, 5):
        for i in range(n_per_class):
            phase = rng.uniform(0, 2 * np.pi)
            wave = CLASS_AMPLITUDE[label] * np.sin(2 * np.pi * CLASS_FREQ[label] * t + phase)
            wave = np.round(wave + rng.normal(0.0, noise, size=N_SAMPLES))
            ids.append(f"S{label}.{i}")
            rows.append(wave)
            labels.append(label)
    order = rng.permutation(len(ids))
    return EegDataset(
        ids=[ids[i] for i in order],
        samples=np.vstack(rows)[order],
        labels=np.asarray(labels, dtype=np.int64)[order],
        provenance={"source": "synthetic"},
    )


@pytest.fixture(scope="session")
def synthetic_dataset() -> EegDataset:
    return make_synthetic_dataset(n_per_class=40, seed=0)


@pytest.fixture()
def synthetic_csv(tmp_path):
    ds = make_synthetic_dataset(n_per_class=24, seed=3)
    path = tmp_path / "synthetic.csv"
    save_csv(ds, path)
    return path
