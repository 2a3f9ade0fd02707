"""Benchmark tables and figures.

The multiclass table lists per-class precision plus overall accuracy, one
row per model in the fixed benchmark order, best seizure precision and best
overall accuracy flagged. The binary summary is a (model, accuracy, auc)
CSV plus a grouped bar chart (blue accuracy, yellow AUC, y-axis cut at 0.5).
The waveform demo stacks one example trace per activity class.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from eegbench.dataset import EegRecord
from eegbench.experiment import MODEL_ORDER
from eegbench.metrics import TABLE_COLUMNS, MetricsReport

MODEL_DISPLAY = {
    "nb": "Naive Bayes",
    "logreg": "Logistic Regression",
    "linsvm": "LinearSVM",
    "knn": "KNN",
    "rf": "Random Forest",
    "gbdt": "GBDT",
    "cnn": "CNN",
    "gru": "GRU",
    "lstm": "LSTM",
}


def _ordered(reports: dict[str, MetricsReport]) -> list[tuple[str, MetricsReport | None]]:
    return [(kind, reports.get(kind)) for kind in MODEL_ORDER]


def emit_table1(
    reports: dict[str, MetricsReport], md_path: str | Path, csv_path: str | Path
) -> list[str]:
    """Write the multiclass table as Markdown and CSV; returns warnings."""
    rows = _ordered(reports)
    warnings = [f"no multiclass result for {kind}; row left blank"
                for kind, report in rows if report is None]
    present = [(k, r) for k, r in rows if r is not None]
    best_seizure = max((r.precision.get("Seizure", 0.0) for _, r in present), default=None)
    best_overall = max((r.accuracy for _, r in present), default=None)

    header = ["Model"] + TABLE_COLUMNS + ["Overall Accuracy"]
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header + ["best_seizure_precision", "best_overall_accuracy"])
        for kind, report in rows:
            if report is None:
                writer.writerow([MODEL_DISPLAY[kind]] + [""] * 8)
                continue
            flags = [
                int(report.precision.get("Seizure", 0.0) == best_seizure),
                int(report.accuracy == best_overall),
            ]
            writer.writerow([MODEL_DISPLAY[kind]] + report.table_row() + flags)

    lines = ["| " + " | ".join(header) + " |",
             "|" + "|".join(["---"] * len(header)) + "|"]
    for kind, report in rows:
        if report is None:
            lines.append("| " + MODEL_DISPLAY[kind] + " |" + " |" * (len(header) - 1))
            continue
        cells = report.table_row()
        if report.precision.get("Seizure", 0.0) == best_seizure:
            cells[0] = f"**{cells[0]}**"
        if report.accuracy == best_overall:
            cells[-1] = f"**{cells[-1]}**"
        lines.append("| " + " | ".join([MODEL_DISPLAY[kind]] + cells) + " |")
    Path(md_path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return warnings


def emit_binary_summary(reports: dict[str, MetricsReport], csv_path: str | Path) -> None:
    """(model, accuracy, auc) rows for the binary bar chart, with a marker
    column confirming every value clears 0.5."""
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["model", "accuracy", "auc", "note"])
        for kind, report in _ordered(reports):
            if report is None:
                continue
            note = "over_0.5" if report.accuracy > 0.5 and (report.auc or 0) > 0.5 else ""
            writer.writerow(
                [MODEL_DISPLAY[kind], f"{report.accuracy:.6f}", f"{report.auc:.6f}", note]
            )


def render_binary_bars(reports: dict[str, MetricsReport], png_path: str | Path) -> None:
    """Grouped accuracy/AUC bars; blue accuracy, yellow AUC, y-axis from 0.5."""
    present = [(k, r) for k, r in _ordered(reports) if r is not None]
    if not present:
        raise ValueError("no binary results to plot")
    labels = [MODEL_DISPLAY[k] for k, _ in present]
    accuracy = [r.accuracy for _, r in present]
    auc = [r.auc for _, r in present]
    x = np.arange(len(labels))
    width = 0.38
    fig, ax = plt.subplots(figsize=(10, 4.5))
    ax.bar(x - width / 2, accuracy, width, label="Accuracy", color="tab:blue")
    ax.bar(x + width / 2, auc, width, label="AUC", color="gold")
    ax.set_ylim(0.5, 1.02)
    ax.set_ylabel("Score")
    ax.set_xticks(x)
    ax.set_xticklabels(labels, rotation=30, ha="right")
    ax.legend(loc="lower right")
    ax.grid(axis="y", alpha=0.3)
    fig.tight_layout()
    fig.savefig(png_path, dpi=150)
    plt.close(fig)


def render_waveforms(records: list[EegRecord], png_path: str | Path) -> None:
    """One stacked panel per record, top to bottom in the given order."""
    if not records:
        raise ValueError("no records to plot")
    fig, axes = plt.subplots(len(records), 1, figsize=(9, 1.8 * len(records)), sharex=True)
    if len(records) == 1:
        axes = [axes]
    t = np.arange(1, records[0].samples.size + 1)
    for ax, record in zip(axes, records):
        ax.plot(t, record.samples, linewidth=0.8)
        ax.set_ylabel("uV", fontsize=8)
        ax.set_title(record.label.display_name, fontsize=9, loc="left")
    axes[-1].set_xlabel("sample (1..178)")
    fig.tight_layout()
    fig.savefig(png_path, dpi=150)
    plt.close(fig)


def render_history(history_csv: str | Path, png_path: str | Path) -> None:
    """Train-loss / validation-accuracy curves from an exported history CSV."""
    epochs, losses, accs = [], [], []
    with open(history_csv, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            epochs.append(int(row["epoch"]))
            losses.append(float(row["train_loss"]))
            accs.append(float(row["val_accuracy"]))
    fig, ax1 = plt.subplots(figsize=(7, 4))
    ax1.plot(epochs, losses, color="tab:red", label="train loss")
    ax1.set_xlabel("epoch")
    ax1.set_ylabel("train loss", color="tab:red")
    ax2 = ax1.twinx()
    ax2.plot(epochs, accs, color="tab:blue", label="val accuracy")
    ax2.set_ylabel("val accuracy", color="tab:blue")
    fig.tight_layout()
    fig.savefig(png_path, dpi=150)
    plt.close(fig)
