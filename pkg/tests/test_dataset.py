import csv

import numpy as np
import pytest

from eegbench.dataset import (
    ALL_LABELS,
    ClassLabel,
    EegDataset,
    N_SAMPLES,
    class_distribution,
    export_waveform_csv,
    load_csv,
    sample_per_class,
    save_csv,
)
from eegbench.errors import (
    EmptyInputError,
    InsufficientClassError,
    ParseError,
    SchemaError,
)
from tests.conftest import make_synthetic_dataset


def write_rows(path, rows, header=None):
    if header is None:
        header = [""] + [f"X{j}" for j in range(1, N_SAMPLES + 1)] + ["y"]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
    return path


def fixture_row(record_id, value, label):
    return [record_id] + [value] * N_SAMPLES + [label]


class TestClassLabel:
    def test_code_name_bijection(self):
        expected = {
            1: "Seizure",
            2: "TumorArea",
            3: "HealthArea",
            4: "EyesClosed",
            5: "EyesOpen",
        }
        assert {label.value: label.display_name for label in ALL_LABELS} == expected
        assert len({label.display_name for label in ALL_LABELS}) == 5


class TestLoadCsv:
    def test_five_row_fixture(self, tmp_path):
        rows = [fixture_row(f"R{c}", c * 10, c) for c in (1, 2, 3, 4, 5)]
        ds = load_csv(write_rows(tmp_path / "five.csv", rows))
        assert len(ds) == 5
        assert sorted(ds.labels.tolist()) == [1, 2, 3, 4, 5]
        assert ds.samples.shape == (5, N_SAMPLES)
        assert ds.ids[0] == "R1"

    def test_out_of_domain_label(self, tmp_path):
        rows = [fixture_row("R1", 1, 1), fixture_row("R2", 2, 7)]
        with pytest.raises(ParseError, match="row 3"):
            load_csv(write_rows(tmp_path / "bad.csv", rows))

    def test_non_numeric_sample(self, tmp_path):
        row = fixture_row("R1", 1, 1)
        row[5] = "oops"
        with pytest.raises(ParseError, match="row 2"):
            load_csv(write_rows(tmp_path / "bad.csv", [row]))

    def test_missing_column(self, tmp_path):
        header = [""] + [f"X{j}" for j in range(1, N_SAMPLES)] + ["y"]
        rows = [["R1"] + [1] * (N_SAMPLES - 1) + [1]]
        with pytest.raises(SchemaError, match="X178"):
            load_csv(write_rows(tmp_path / "short.csv", rows, header=header))

    def test_extra_column(self, tmp_path):
        header = [""] + [f"X{j}" for j in range(1, N_SAMPLES + 1)] + ["y", "extra"]
        rows = [["R1"] + [1] * N_SAMPLES + [1, 9]]
        with pytest.raises(SchemaError, match="extra"):
            load_csv(write_rows(tmp_path / "long.csv", rows, header=header))

    def test_renamed_column(self, tmp_path):
        header = [""] + [f"X{j}" for j in range(1, N_SAMPLES)] + ["Z9", "y"]
        rows = [["R1"] + [1] * N_SAMPLES + [1]]
        with pytest.raises(SchemaError, match="Z9"):
            load_csv(write_rows(tmp_path / "renamed.csv", rows, header=header))

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("")
        with pytest.raises(EmptyInputError):
            load_csv(path)

    def test_header_only(self, tmp_path):
        with pytest.raises(EmptyInputError):
            load_csv(write_rows(tmp_path / "header.csv", []))

    def test_round_trip(self, tmp_path):
        ds = make_synthetic_dataset(n_per_class=4, seed=1)
        out = tmp_path / "round.csv"
        save_csv(ds, out)
        again = load_csv(out)
        assert again.ids == ds.ids
        np.testing.assert_array_equal(again.samples, ds.samples)
        np.testing.assert_array_equal(again.labels, ds.labels)

    def test_load_order_is_stable(self, synthetic_csv):
        first = load_csv(synthetic_csv)
        second = load_csv(synthetic_csv)
        assert first.ids == second.ids
        np.testing.assert_array_equal(first.samples, second.samples)


class TestClassDistribution:
    def test_five_row_fixture(self, tmp_path):
        rows = [fixture_row(f"R{c}", c, c) for c in (1, 2, 3, 4, 5)]
        ds = load_csv(write_rows(tmp_path / "five.csv", rows))
        assert all(count == 1 for count in class_distribution(ds).values())

    def test_single_class_fixture(self, tmp_path):
        rows = [fixture_row(f"R{i}", i, 1) for i in range(3)]
        ds = load_csv(write_rows(tmp_path / "seizure.csv", rows))
        counts = class_distribution(ds)
        assert counts[ClassLabel.SEIZURE] == 3
        assert all(counts[label] == 0 for label in ALL_LABELS if label != ClassLabel.SEIZURE)

    def test_counts_sum_to_size(self, synthetic_dataset):
        counts = class_distribution(synthetic_dataset)
        assert sum(counts.values()) == len(synthetic_dataset)


class TestSamplePerClass:
    def test_unique_choice(self, tmp_path):
        rows = [fixture_row(f"R{c}", c, c) for c in (5, 4, 3, 2, 1)]
        ds = load_csv(write_rows(tmp_path / "five.csv", rows))
        picks = sample_per_class(ds, seed=11)
        assert [p.label.value for p in picks] == [1, 2, 3, 4, 5]
        assert [p.id for p in picks] == ["R1", "R2", "R3", "R4", "R5"]

    def test_deterministic(self, synthetic_dataset):
        a = sample_per_class(synthetic_dataset, seed=7)
        b = sample_per_class(synthetic_dataset, seed=7)
        assert [r.id for r in a] == [r.id for r in b]

    def test_one_per_class_any_seed(self, synthetic_dataset):
        for seed in (1, 2, 99):
            picks = sample_per_class(synthetic_dataset, seed=seed)
            assert [p.label.value for p in picks] == [1, 2, 3, 4, 5]

    def test_missing_class(self, tmp_path):
        rows = [fixture_row(f"R{i}", i, 1) for i in range(3)]
        ds = load_csv(write_rows(tmp_path / "only1.csv", rows))
        with pytest.raises(InsufficientClassError, match="TumorArea"):
            sample_per_class(ds, seed=0)


class TestWaveformExport:
    def test_all_zero_record(self, tmp_path, synthetic_dataset):
        record = synthetic_dataset.record(0)
        zero = type(record)(id="Z", samples=np.zeros(N_SAMPLES), label=record.label)
        path = tmp_path / "wave.csv"
        export_waveform_csv([zero], path)
        with open(path) as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["t", "Z"]
        assert len(rows) == N_SAMPLES + 1
        assert all(float(r[1]) == 0.0 for r in rows[1:])
        assert [int(r[0]) for r in rows[1:]] == list(range(1, N_SAMPLES + 1))

    def test_five_records(self, tmp_path, synthetic_dataset):
        picks = sample_per_class(synthetic_dataset, seed=3)
        path = tmp_path / "wave5.csv"
        export_waveform_csv(picks, path)
        with open(path) as fh:
            rows = list(csv.reader(fh))
        assert len(rows[0]) == 6
        assert len(rows) == N_SAMPLES + 1

    def test_empty_list(self, tmp_path):
        with pytest.raises(EmptyInputError):
            export_waveform_csv([], tmp_path / "nope.csv")


class TestDatasetInvariants:
    def test_non_empty_required(self):
        with pytest.raises(EmptyInputError):
            EegDataset(ids=[], samples=np.zeros((0, N_SAMPLES)), labels=np.zeros(0, dtype=int))

    def test_record_view(self, synthetic_dataset):
        rec = synthetic_dataset.record(2)
        assert rec.id == synthetic_dataset.ids[2]
        np.testing.assert_array_equal(rec.samples, synthetic_dataset.samples[2])
