"""Deterministic work distribution.

Every parallel unit (forest tree, one-vs-all class, grid cell, CV fold)
receives its own sub-seed derived from the master seed, so results are
identical whether units run serially or on a thread pool. EEGBENCH_THREADS
caps the pool size; 1 (the default) means plain sequential execution.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

import numpy as np

T = TypeVar("T")
R = TypeVar("R")


def thread_cap() -> int:
    raw = os.environ.get("EEGBENCH_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def spawn_seeds(seed: int, n: int) -> list[int]:
    """n independent sub-seeds, deterministic in (seed, n index)."""
    children = np.random.SeedSequence(seed).spawn(n)
    return [int(c.generate_state(1)[0]) for c in children]


def ordered_map(fn: Callable[[T], R], items: Sequence[T]) -> list[R]:
    """Map preserving input order, threaded only when EEGBENCH_THREADS > 1."""
    workers = min(thread_cap(), max(1, len(items)))
    if workers == 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
