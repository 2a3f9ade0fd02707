"""Loading and validation of the one-second EEG chunk CSV.

The expected file layout is the public seizure-recognition CSV: a header row
``id,X1,...,X178,y`` (the first header cell may be blank), then one row per
one-second chunk with 178 voltage samples and an activity label in 1..5.
"""

from __future__ import annotations

import csv
import enum
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from eegbench.errors import (
    EmptyInputError,
    InsufficientClassError,
    ParseError,
    SchemaError,
)

N_SAMPLES = 178


class ClassLabel(enum.IntEnum):
    """The five recorded brain activities, coded 1..5."""

    SEIZURE = 1
    TUMOR_AREA = 2
    HEALTH_AREA = 3
    EYES_CLOSED = 4
    EYES_OPEN = 5

    @property
    def display_name(self) -> str:
        return _DISPLAY_NAMES[self]


_DISPLAY_NAMES = {
    ClassLabel.SEIZURE: "Seizure",
    ClassLabel.TUMOR_AREA: "TumorArea",
    ClassLabel.HEALTH_AREA: "HealthArea",
    ClassLabel.EYES_CLOSED: "EyesClosed",
    ClassLabel.EYES_OPEN: "EyesOpen",
}

ALL_LABELS = tuple(ClassLabel)


@dataclass(frozen=True)
class EegRecord:
    """One subject-second: 178 voltage samples plus an activity label."""

    id: str
    samples: np.ndarray  # (178,) float64
    label: ClassLabel

    def __post_init__(self):
        if self.samples.shape != (N_SAMPLES,):
            raise ValueError(f"expected {N_SAMPLES} samples, got {self.samples.shape}")
        if not np.all(np.isfinite(self.samples)):
            raise ValueError(f"record {self.id!r} has non-finite samples")


@dataclass
class EegDataset:
    """An ordered collection of EEG records, stored column-major for speed.

    ``samples[i]`` and ``labels[i]`` belong to ``ids[i]``; row order is the
    source-file order and every downstream seed-keyed operation relies on it.
    """

    ids: list[str]
    samples: np.ndarray  # (n, 178) float64
    labels: np.ndarray  # (n,) int64, values in 1..5
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.ids)
        if n == 0:
            raise EmptyInputError("dataset has no records")
        if self.samples.shape != (n, N_SAMPLES):
            raise ValueError(f"samples shape {self.samples.shape} != ({n}, {N_SAMPLES})")
        if self.labels.shape != (n,):
            raise ValueError("labels length does not match ids")

    def __len__(self) -> int:
        return len(self.ids)

    def record(self, i: int) -> EegRecord:
        return EegRecord(self.ids[i], self.samples[i].copy(), ClassLabel(int(self.labels[i])))

    def records(self) -> list[EegRecord]:
        return [self.record(i) for i in range(len(self))]


def _check_header(header: list[str]) -> None:
    expected = [f"X{j}" for j in range(1, N_SAMPLES + 1)] + ["y"]
    # First cell is the id column; the public file leaves it blank.
    got = [cell.strip() for cell in header[1:]]
    missing = [name for name in expected if name not in set(got)]
    extra = [name for name in got if name not in set(expected)]
    if missing and extra:
        raise SchemaError(f"unexpected column {extra[0]!r} where {missing[0]!r} was expected")
    if missing:
        raise SchemaError(f"missing column {missing[0]!r}")
    if extra:
        raise SchemaError(f"extra column {extra[0]!r}")
    if got != expected:
        raise SchemaError("columns are out of order; expected id,X1..X178,y")


def load_csv(path: str | Path) -> EegDataset:
    """Load and validate a seizure-recognition CSV.

    Raises SchemaError on a malformed header, ParseError (with the row
    number) on a non-numeric sample or a label outside 1..5, and
    EmptyInputError on a file with no data rows.
    """
    path = Path(path)
    ids: list[str] = []
    rows: list[np.ndarray] = []
    labels: list[int] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyInputError(f"{path} is empty") from None
        _check_header(header)
        for row_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != N_SAMPLES + 2:
                raise ParseError(f"row {row_no}: expected {N_SAMPLES + 2} fields, got {len(row)}")
            try:
                samples = np.asarray(row[1 : N_SAMPLES + 1], dtype=np.float64)
            except ValueError:
                raise ParseError(f"row {row_no}: non-numeric sample value") from None
            if not np.all(np.isfinite(samples)):
                raise ParseError(f"row {row_no}: non-finite sample value")
            try:
                y = int(row[-1])
            except ValueError:
                raise ParseError(f"row {row_no}: non-numeric label {row[-1]!r}") from None
            if y not in (1, 2, 3, 4, 5):
                raise ParseError(f"row {row_no}: label {y} outside 1..5")
            ids.append(row[0])
            rows.append(samples)
            labels.append(y)
    if not rows:
        raise EmptyInputError(f"{path} has a header but no data rows")
    return EegDataset(
        ids=ids,
        samples=np.vstack(rows),
        labels=np.asarray(labels, dtype=np.int64),
        provenance={"source": str(path), "loaded_at": time.strftime("%Y-%m-%dT%H:%M:%S")},
    )


def save_csv(ds: EegDataset, path: str | Path) -> None:
    """Re-serialize a dataset in the same layout load_csv reads."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([""] + [f"X{j}" for j in range(1, N_SAMPLES + 1)] + ["y"])
        for i in range(len(ds)):
            writer.writerow([ds.ids[i], *_format_values(ds.samples[i]), int(ds.labels[i])])


def _format_values(values: np.ndarray) -> list[str]:
    # Integers stay integers, so a load->save->load round trip is exact.
    return [repr(int(v)) if float(v).is_integer() else repr(float(v)) for v in values]


def class_distribution(ds: EegDataset) -> dict[ClassLabel, int]:
    """Record count per activity label; absent labels count 0."""
    counts = {label: 0 for label in ALL_LABELS}
    values, freq = np.unique(ds.labels, return_counts=True)
    for v, f in zip(values, freq):
        counts[ClassLabel(int(v))] = int(f)
    return counts


def sample_per_class(ds: EegDataset, seed: int) -> list[EegRecord]:
    """Pick one record per activity, ordered Seizure..EyesOpen, seeded."""
    rng = np.random.default_rng(seed)
    picks = []
    for label in ALL_LABELS:
        indices = np.flatnonzero(ds.labels == label.value)
        if indices.size == 0:
            raise InsufficientClassError(f"no records with label {label.display_name}")
        picks.append(ds.record(int(rng.choice(indices))))
    return picks


def export_waveform_csv(records: list[EegRecord], path: str | Path) -> None:
    """Write raw waveforms as a CSV with a t column (1..178) and one column per record."""
    if not records:
        raise EmptyInputError("no records to export")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t"] + [r.id for r in records])
        for t in range(N_SAMPLES):
            writer.writerow([t + 1] + [repr(float(r.samples[t])) for r in records])
