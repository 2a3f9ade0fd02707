"""Command-line entry point.

Verbs: `run` one configured experiment, `suite` every model on both tasks,
`report` re-emit tables and figures from stored run directories, `demo`
export one waveform per activity class, `check` run the property/oracle
suites. Flag precedence is flags > config file > defaults. Failures exit
nonzero with a machine-readable error JSON on stderr. EEGBENCH_THREADS
caps worker threads (1, the default, is fully deterministic mode).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from eegbench.dataset import load_csv, sample_per_class, export_waveform_csv
from eegbench.errors import ConfigError, EegBenchError
from eegbench.experiment import (
    MODEL_ORDER,
    ExperimentConfig,
    run_experiment,
    run_suite,
)
from eegbench.metrics import MetricsReport
from eegbench.preprocessing import TaskKind
from eegbench import reporting
from eegbench.selfcheck import run_all_checks


def _parse_args(argv):
    parser = argparse.ArgumentParser(prog="eegbench",
                                     description="Seizure-detection benchmark runner")
    sub = parser.add_subparsers(dest="verb", required=True)

    run_p = sub.add_parser("run", help="run one experiment")
    run_p.add_argument("--config", help="JSON config file")
    run_p.add_argument("--data", help="path to the EEG CSV")
    run_p.add_argument("--model", choices=MODEL_ORDER)
    run_p.add_argument("--task", choices=["binary", "multiclass"])
    run_p.add_argument("--seed", type=int)
    run_p.add_argument("--fast", action="store_true", help="subsampled smoke run")
    run_p.add_argument("--out", help="output directory")

    suite_p = sub.add_parser("suite", help="run all models on both tasks")
    suite_p.add_argument("--data", required=True)
    suite_p.add_argument("--seed", type=int, default=42)
    suite_p.add_argument("--seeds", help="comma-separated seed list (overrides --seed)")
    suite_p.add_argument("--out", required=True)
    suite_p.add_argument("--fast", action="store_true")
    suite_p.add_argument("--models", help="comma-separated subset of model kinds")
    suite_p.add_argument("--tasks", help="comma-separated subset of tasks")

    report_p = sub.add_parser("report", help="re-emit tables/figures from stored runs")
    report_p.add_argument("--in", dest="in_dir", required=True)
    report_p.add_argument("--out", help="output directory (default: --in)")

    demo_p = sub.add_parser("demo", help="export one waveform per class")
    demo_p.add_argument("--data", required=True)
    demo_p.add_argument("--seed", type=int, default=42)
    demo_p.add_argument("--out", required=True)

    sub.add_parser("check", help="run the property/oracle suites")
    return parser.parse_args(argv)


def _config_from_flags(args) -> ExperimentConfig:
    fields: dict = {}
    if args.config:
        fields.update(json.loads(Path(args.config).read_text()))
    for key, value in (
        ("data", args.data),
        ("model", args.model),
        ("task", args.task),
        ("seed", args.seed),
        ("out_dir", args.out),
    ):
        if value is not None:
            fields[key] = value
    if args.fast:
        fields["fast_mode"] = True
    return ExperimentConfig.from_dict(fields)


def _print_report(report: MetricsReport) -> None:
    print(f"{report.model_id}: accuracy={report.accuracy:.3f}", end="")
    if report.auc is not None:
        print(f" auc={report.auc:.3f}", end="")
    print()


def _collect_reports(root: Path) -> list[dict]:
    found = []
    for path in sorted(root.rglob("result.json")):
        with open(path) as fh:
            found.append(json.load(fh))
    return found


def _emit_reports(results: list[dict], out: Path) -> None:
    """Tables, delimited summaries and figures from stored run results."""
    out.mkdir(parents=True, exist_ok=True)
    by_seed: dict[int, dict[str, dict[str, MetricsReport]]] = {}
    for result in results:
        report = MetricsReport.from_dict(result["metrics"])
        model = result["config"]["model"]
        by_seed.setdefault(report.seed, {"binary": {}, "multiclass": {}})[
            report.task.value
        ][model] = report
    if not by_seed:
        raise EegBenchError("no result.json files found")

    multi_seed = len(by_seed) > 1
    for seed, grouped in sorted(by_seed.items()):
        suffix = f"-seed{seed}" if multi_seed else ""
        if grouped["multiclass"]:
            warnings = reporting.emit_table1(
                grouped["multiclass"],
                out / f"multiclass_table{suffix}.md",
                out / f"multiclass_table{suffix}.csv",
            )
            for line in warnings:
                print(f"warning: {line}", file=sys.stderr)
        if grouped["binary"]:
            reporting.emit_binary_summary(
                grouped["binary"], out / f"binary_summary{suffix}.csv"
            )
            reporting.render_binary_bars(
                grouped["binary"], out / f"binary_summary{suffix}.png"
            )
    if multi_seed:
        _emit_seed_summary(by_seed, out / "seed_summary.csv")
    print(f"reports written to {out}")


def _emit_seed_summary(by_seed, path: Path) -> None:
    """Mean and standard deviation across seeds, one row per (task, model)."""
    rows = []
    for task in ("binary", "multiclass"):
        for model in MODEL_ORDER:
            stats: dict[str, list[float]] = {}
            for grouped in by_seed.values():
                report = grouped[task].get(model)
                if report is None:
                    continue
                stats.setdefault("accuracy", []).append(report.accuracy)
                if report.auc is not None:
                    stats.setdefault("auc", []).append(report.auc)
                seizure = report.precision.get("Seizure")
                if seizure is not None:
                    stats.setdefault("seizure_precision", []).append(seizure)
            if not stats:
                continue
            row = {"task": task, "model": model, "n_seeds": len(stats["accuracy"])}
            for metric, values in stats.items():
                row[f"{metric}_mean"] = f"{np.mean(values):.6f}"
                row[f"{metric}_sd"] = f"{np.std(values):.6f}"
            rows.append(row)
    columns = ["task", "model", "n_seeds", "accuracy_mean", "accuracy_sd",
               "auc_mean", "auc_sd", "seizure_precision_mean", "seizure_precision_sd"]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns)
        writer.writeheader()
        for row in rows:
            writer.writerow({c: row.get(c, "") for c in columns})


def _verb_run(args) -> int:
    config = _config_from_flags(args)
    result = run_experiment(config)
    _print_report(result.report)
    if config.out_dir:
        print(f"artifacts in {config.out_dir}")
    return 0


def _verb_suite(args) -> int:
    seeds = [int(s) for s in args.seeds.split(",")] if args.seeds else [args.seed]
    models = args.models.split(",") if args.models else None
    tasks = [TaskKind(t) for t in args.tasks.split(",")] if args.tasks else None
    out = Path(args.out)
    any_failure = False
    all_results: list[dict] = []
    for seed in seeds:
        seed_out = out / f"seed{seed}" if len(seeds) > 1 else out
        outcome = run_suite(
            args.data, seed, out_dir=str(seed_out / "runs"), fast_mode=args.fast,
            models=models, tasks=tasks,
        )
        for result in outcome.results:
            _print_report(result.report)
            all_results.append(result.to_dict())
        for model_id, error in outcome.failures.items():
            any_failure = True
            print(f"FAILED {model_id}: {error}", file=sys.stderr)
    _emit_reports(all_results, out / "reports")
    return 1 if any_failure else 0


def _verb_report(args) -> int:
    in_dir = Path(args.in_dir)
    out = Path(args.out) if args.out else in_dir
    _emit_reports(_collect_reports(in_dir), out)
    return 0


def _verb_demo(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    dataset = load_csv(args.data)
    picks = sample_per_class(dataset, args.seed)
    export_waveform_csv(picks, out / "waveforms.csv")
    reporting.render_waveforms(picks, out / "waveforms.png")
    print(f"wrote {out / 'waveforms.csv'} and {out / 'waveforms.png'}")
    return 0


def main(argv=None) -> int:
    args = _parse_args(argv if argv is not None else sys.argv[1:])
    try:
        if args.verb == "run":
            return _verb_run(args)
        if args.verb == "suite":
            return _verb_suite(args)
        if args.verb == "report":
            return _verb_report(args)
        if args.verb == "demo":
            return _verb_demo(args)
        if args.verb == "check":
            return 0 if run_all_checks() else 1
        raise ConfigError(f"unknown verb {args.verb}")
    except Exception as exc:
        print(
            json.dumps({"error": type(exc).__name__, "message": str(exc)}),
            file=sys.stderr,
        )
        return 1


if __name__ == "__main__":
    sys.exit(main())
