"""Config-driven experiment runner.

One run: load the CSV, relabel for the task, stratified 8:2 split, fit the
global scaler on the training side only, then either grid-search a classical
model over a stratified 5-fold plan (refit the winner on the full training
set) or train a network against an inner 8:2 validation split with early
stopping. The untouched 20% test side is scored exactly once. Every run
writes a self-contained directory: config echo, split manifest, serialized
model, metrics JSON, timings.

The same seed drives the split, the fold plan, bootstraps and network
initialization, so two models in one suite see identical test indices and a
rerun reproduces byte-identical metrics.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from eegbench.dataset import EegDataset, load_csv
from eegbench.errors import ConfigError
from eegbench.metrics import MetricsReport, compute_report
from eegbench.models import (
    GaussianNbModel,
    GbdtModel,
    KnnModel,
    LinearModel,
    RandomForestModel,
    grid_search,
    model_to_dict,
)
from eegbench.models.grid import expand_grid
from eegbench.nn.networks import build_cnn, build_rnn, network_to_dict
from eegbench.nn.networks import predict_proba as network_predict_proba
from eegbench.nn.training import TrainConfig, export_history_csv, train_network
from eegbench.preprocessing import (
    TaskKind,
    apply_minmax,
    class_weights,
    fit_minmax,
    kfold_stratified,
    relabel,
    sample_weights,
    stratified_split,
)

MODEL_ORDER = ["nb", "logreg", "linsvm", "knn", "rf", "gbdt", "cnn", "gru", "lstm"]
CLASSICAL_KINDS = {"nb", "logreg", "linsvm", "knn", "rf", "gbdt"}
NEURAL_KINDS = {"cnn", "gru", "lstm"}

TRAIN_RATIO = 0.8
CV_FOLDS = 5

FAST_MODE_RECORDS = 500
FAST_MODE_EPOCHS = 10
FAST_MODE_TREES = 25

DEFAULT_HYPERPARAMETERS: dict[str, dict] = {
    "nb": {},
    "logreg": {"l2_lambda": 1e-4},
    "linsvm": {"l2_lambda": 1e-4},
    "knn": {"k": 5},
    "rf": {"n_estimators": 200, "max_depth": None},
    "gbdt": {"learning_rate": 0.1, "n_rounds": 100, "max_depth": 3},
    "cnn": {"kernel_sizes": (7, 5), "batch_size": 32, "max_epochs": 100,
            "step_size": 1e-3, "patience": 10},
    "gru": {"batch_size": 32, "max_epochs": 100, "step_size": 1e-3, "patience": 10,
            "dropout_rate": 0.5},
    "lstm": {"batch_size": 32, "max_epochs": 100, "step_size": 1e-3, "patience": 10,
             "dropout_rate": 0.5},
}

# Cheap hyperparameters get CV grids by default; tree-ensemble grids are
# opt-in via the config's param_grid because a full sweep multiplies their
# runtime by the grid size times the fold count.
DEFAULT_GRIDS: dict[str, dict] = {
    "nb": {},
    "logreg": {"l2_lambda": [1e-4, 1e-2]},
    "linsvm": {"l2_lambda": [1e-4, 1e-2]},
    "knn": {"k": [1, 3, 5, 7, 11]},
    "rf": {},
    "gbdt": {},
}

# The documented sweep for the forest's two tuned factors.
RF_FULL_GRID = {"n_estimators": [100, 200], "max_depth": [10, 20, None]}


@dataclass
class ExperimentConfig:
    data: str
    model: str
    task: TaskKind
    seed: int
    out_dir: str | None = None
    fast_mode: bool = False
    hyperparameters: dict = field(default_factory=dict)
    param_grid: dict | None = None

    def __post_init__(self):
        if self.model not in MODEL_ORDER:
            raise ConfigError(f"unknown model kind {self.model!r}; expected one of {MODEL_ORDER}")
        if not isinstance(self.task, TaskKind):
            self.task = TaskKind(self.task)
        if self.seed is None:
            raise ConfigError("every run must carry a seed")
        self.seed = int(self.seed)

    @property
    def model_id(self) -> str:
        return f"{self.model}-{self.task.value}-seed{self.seed}"

    def to_dict(self) -> dict:
        return {
            "data": str(self.data),
            "model": self.model,
            "task": self.task.value,
            "seed": self.seed,
            "out_dir": None if self.out_dir is None else str(self.out_dir),
            "fast_mode": self.fast_mode,
            "hyperparameters": dict(self.hyperparameters),
            "param_grid": self.param_grid,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config field(s): {sorted(unknown)}")
        missing = {"data", "model", "task", "seed"} - set(d)
        if missing:
            raise ConfigError(f"config missing required field(s): {sorted(missing)}")
        return cls(**d)


@dataclass
class RunResult:
    config: ExperimentConfig
    report: MetricsReport
    chosen_hyperparameters: dict
    cv: dict | None
    timings: dict[str, float]
    artifacts: dict[str, str]

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "model_id": self.config.model_id,
            "chosen_hyperparameters": _plain(self.chosen_hyperparameters),
            "cv": self.cv,
            "metrics": self.report.to_dict(),
            "timings": self.timings,
            "artifacts": self.artifacts,
        }


def _plain(value):
    """JSON-safe copy (tuples to lists, numpy scalars to python)."""
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, (np.integer, np.floating)):
        return value.item()
    return value


def stratified_subsample(labels: np.ndarray, cap: int, seed: int) -> np.ndarray:
    """At most `cap` indices with per-class proportions preserved, sorted to
    keep the original record order."""
    labels = np.asarray(labels)
    n = labels.size
    if n <= cap:
        return np.arange(n)
    rng = np.random.default_rng(seed)
    picks = []
    values = np.unique(labels)
    for value in values:
        indices = np.flatnonzero(labels == value)
        take = max(1, int(round(cap * indices.size / n)))
        picks.append(rng.choice(indices, size=min(take, indices.size), replace=False))
    return np.sort(np.concatenate(picks))


def _build_classical(kind: str, params: dict, seed: int):
    if kind == "nb":
        return GaussianNbModel()
    if kind == "knn":
        return KnnModel(k=params["k"])
    if kind == "logreg":
        return LinearModel(loss_kind="logistic", l2_lambda=params["l2_lambda"])
    if kind == "linsvm":
        return LinearModel(loss_kind="hinge", l2_lambda=params["l2_lambda"])
    if kind == "rf":
        return RandomForestModel(
            n_estimators=params["n_estimators"], max_depth=params["max_depth"], seed=seed
        )
    if kind == "gbdt":
        return GbdtModel(
            learning_rate=params["learning_rate"],
            n_rounds=params["n_rounds"],
            max_depth=params["max_depth"],
            seed=seed,
        )
    raise ConfigError(f"not a classical model kind: {kind}")


def _fit_classical(kind: str, params: dict, X, y, seed: int, weighted: bool):
    model = _build_classical(kind, params, seed)
    if kind in ("logreg", "linsvm", "gbdt") and weighted:
        weights = sample_weights(y, class_weights(y))
        model.fit(X, y, sample_weight=weights)
    else:
        model.fit(X, y)
    return model


def _resolve_params(config: ExperimentConfig) -> tuple[dict, dict | None]:
    """(hyperparameters after overrides and fast-mode caps, grid or None)."""
    params = dict(DEFAULT_HYPERPARAMETERS[config.model])
    params.update(config.hyperparameters)
    if config.fast_mode:
        if "n_estimators" in params:
            params["n_estimators"] = min(params["n_estimators"], FAST_MODE_TREES)
        if "n_rounds" in params:
            params["n_rounds"] = min(params["n_rounds"], FAST_MODE_TREES)
        if "max_epochs" in params:
            params["max_epochs"] = min(params["max_epochs"], FAST_MODE_EPOCHS)
    grid = config.param_grid
    if grid is None and config.model in DEFAULT_GRIDS:
        grid = DEFAULT_GRIDS[config.model]
    return params, grid


def run_experiment(config: ExperimentConfig, dataset: EegDataset | None = None) -> RunResult:
    timings: dict[str, float] = {}
    artifacts: dict[str, str] = {}
    total_start = time.perf_counter()

    start = time.perf_counter()
    if dataset is None:
        dataset = load_csv(config.data)
    timings["load"] = time.perf_counter() - start

    start = time.perf_counter()
    task_labels = relabel(dataset.labels, config.task)
    keep = None
    if config.fast_mode:
        keep = stratified_subsample(task_labels, FAST_MODE_RECORDS, config.seed)
        task_labels = task_labels[keep]
        samples = dataset.samples[keep]
    else:
        samples = dataset.samples
    split = stratified_split(task_labels, TRAIN_RATIO, config.seed)
    scaler = fit_minmax(samples[split.train_indices])
    X = apply_minmax(scaler, samples)
    y = task_labels
    timings["preprocess"] = time.perf_counter() - start

    params, grid = _resolve_params(config)
    weighted = config.task is TaskKind.BINARY
    manifest: dict = {
        "model_id": config.model_id,
        "task": config.task.value,
        "seed": config.seed,
        "scaler": {"v_min": scaler.v_min, "v_max": scaler.v_max},
        "fast_mode_kept_indices": None if keep is None else [int(i) for i in keep],
        "split": split.to_dict(),
        "cv_folds": None,
        "inner_split": None,
    }

    cv_summary = None
    history = None
    start = time.perf_counter()
    if config.model in CLASSICAL_KINDS:
        cells = expand_grid(grid or {})
        if len(cells) > 1:
            folds = kfold_stratified(split.train_indices, y, CV_FOLDS, config.seed)
            manifest["cv_folds"] = folds.to_dict()

            def fit_cell(cell_params, X_fit, y_fit):
                merged = {**params, **cell_params}
                return _fit_classical(config.model, merged, X_fit, y_fit, config.seed, weighted)

            search = grid_search(fit_cell, grid, X, y, folds)
            params = {**params, **search.best_params}
            cv_summary = search.to_dict()
        timings["tune"] = time.perf_counter() - start

        start = time.perf_counter()
        model = _fit_classical(
            config.model, params, X[split.train_indices], y[split.train_indices],
            config.seed, weighted,
        )
        proba_fn = model.predict_proba
        envelope = model_to_dict(model)
    else:
        timings["tune"] = time.perf_counter() - start
        start = time.perf_counter()
        classes = sorted(config.task.class_codes)
        class_index = {c: i for i, c in enumerate(classes)}
        train_idx = split.train_indices
        inner = stratified_split(y[train_idx], TRAIN_RATIO, config.seed)
        inner_train = train_idx[inner.train_indices]
        inner_val = train_idx[inner.test_indices]
        manifest["inner_split"] = {
            "train_indices": sorted(int(i) for i in inner_train),
            "val_indices": sorted(int(i) for i in inner_val),
        }
        if config.model == "cnn":
            network = build_cnn(
                len(classes), kernel_sizes=tuple(params["kernel_sizes"]), seed=config.seed
            )
        else:
            network = build_rnn(
                config.model, len(classes), seed=config.seed,
                dropout_rate=params["dropout_rate"],
            )
        network.classes_ = classes
        train_config = TrainConfig(
            batch_size=params["batch_size"],
            max_epochs=params["max_epochs"],
            step_size=params["step_size"],
            patience=params["patience"],
            seed=config.seed,
        )
        y_idx = np.asarray([class_index[int(v)] for v in y], dtype=np.int64)
        weights = None
        if weighted:
            weights = sample_weights(y[inner_train], class_weights(y[inner_train]))
        outcome = train_network(
            network, X[inner_train], y_idx[inner_train], X[inner_val], y_idx[inner_val],
            train_config, sample_weight=weights,
        )
        history = outcome.history
        params = {**params, "best_epoch": outcome.best_epoch,
                  "best_val_accuracy": outcome.best_val_accuracy}
        model = network
        proba_fn = lambda rows: network_predict_proba(network, rows)
        envelope = network_to_dict(network, classes=classes)
    timings["fit"] = time.perf_counter() - start

    start = time.perf_counter()
    proba = proba_fn(X[split.test_indices])
    report = compute_report(
        config.task, config.model_id, config.seed, proba, y[split.test_indices]
    )
    timings["evaluate"] = time.perf_counter() - start

    if config.out_dir is not None:
        start = time.perf_counter()
        out = Path(config.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        envelope.update({"scaler": manifest["scaler"],
                         "label_scheme": config.task.value, "seed": config.seed})
        artifacts = {
            "config": str(out / "config.json"),
            "split_manifest": str(out / "split_manifest.json"),
            "model": str(out / "model.json"),
            "metrics": str(out / "metrics.json"),
            "result": str(out / "result.json"),
        }
        (out / "config.json").write_text(json.dumps(config.to_dict(), indent=2, sort_keys=True))
        (out / "split_manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True))
        (out / "model.json").write_text(json.dumps(_plain(envelope), sort_keys=True))
        (out / "metrics.json").write_text(report.to_json())
        if history is not None:
            artifacts["history"] = str(out / "history.csv")
            export_history_csv(history, out / "history.csv")
        timings["emit"] = time.perf_counter() - start

    timings["total"] = time.perf_counter() - total_start
    result = RunResult(
        config=config,
        report=report,
        chosen_hyperparameters=params,
        cv=cv_summary,
        timings=timings,
        artifacts=artifacts,
    )
    if config.out_dir is not None:
        (Path(config.out_dir) / "result.json").write_text(
            json.dumps(_plain(result.to_dict()), indent=2, sort_keys=True)
        )
    return result


@dataclass
class SuiteOutcome:
    results: list[RunResult]
    failures: dict[str, str]


def run_suite(
    data: str,
    seed: int,
    out_dir: str | None = None,
    fast_mode: bool = False,
    models: list[str] | None = None,
    tasks: list[TaskKind] | None = None,
    hyperparameters: dict | None = None,
) -> SuiteOutcome:
    """All model kinds on both tasks with one shared split per task."""
    dataset = load_csv(data)
    models = models or MODEL_ORDER
    tasks = tasks or [TaskKind.BINARY, TaskKind.MULTICLASS]
    results: list[RunResult] = []
    failures: dict[str, str] = {}
    for task in tasks:
        for model in models:
            config = ExperimentConfig(
                data=data,
                model=model,
                task=task,
                seed=seed,
                fast_mode=fast_mode,
                out_dir=None if out_dir is None
                else str(Path(out_dir) / f"{model}-{task.value}-seed{seed}"),
                hyperparameters=dict((hyperparameters or {}).get(model, {})),
            )
            try:
                results.append(run_experiment(config, dataset=dataset))
            except Exception as exc:
                failures[config.model_id] = f"{type(exc).__name__}: {exc}"
                if config.out_dir is not None:
                    out = Path(config.out_dir)
                    out.mkdir(parents=True, exist_ok=True)
                    (out / "error.json").write_text(
                        json.dumps({"status": "incomplete",
                                    "error": failures[config.model_id]}, indent=2)
                    )
    return SuiteOutcome(results=results, failures=failures)
