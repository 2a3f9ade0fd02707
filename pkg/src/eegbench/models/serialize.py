"""Self-describing JSON artifacts for fitted models.

The envelope carries the model kind, its hyperparameters and fitted
parameters, the class codes, and the run context (scaler bounds, label
scheme, seed), so a stored run can be reloaded and re-scored without
refitting anything.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from eegbench.models.boosting import GbdtModel
from eegbench.models.forest import RandomForestModel
from eegbench.models.knn import KnnModel
from eegbench.models.linear import LinearModel
from eegbench.models.naive_bayes import GaussianNbModel
from eegbench.models.tree import DecisionTree


def _arr(a: np.ndarray) -> list:
    return np.asarray(a).tolist()


def model_to_dict(model) -> dict:
    if isinstance(model, KnnModel):
        return {
            "model_kind": "knn",
            "hyperparameters": {"k": model.k},
            "classes": model.classes_,
            "parameters": {"train_X": _arr(model.X_), "train_y_idx": _arr(model.y_idx_)},
        }
    if isinstance(model, LinearModel):
        return {
            "model_kind": "logreg" if model.loss_kind == "logistic" else "linsvm",
            "hyperparameters": {
                "loss_kind": model.loss_kind,
                "l2_lambda": model.l2_lambda,
                "step_sizes": list(model.step_sizes),
                "max_epochs": model.max_epochs,
            },
            "classes": model.classes_,
            "parameters": {"weights": _arr(model.weights_), "biases": _arr(model.biases_)},
        }
    if isinstance(model, GaussianNbModel):
        return {
            "model_kind": "nb",
            "hyperparameters": {},
            "classes": model.classes_,
            "parameters": {
                "log_priors": _arr(model.log_priors_),
                "means": _arr(model.means_),
                "variances": _arr(model.variances_),
            },
        }
    if isinstance(model, RandomForestModel):
        return {
            "model_kind": "rf",
            "hyperparameters": {
                "n_estimators": model.n_estimators,
                "max_depth": model.max_depth,
                "feature_subset_size": model.feature_subset_size,
                "bootstrap": model.bootstrap,
                "seed": model.seed,
            },
            "classes": model.classes_,
            "parameters": {"trees": [t.to_dict() for t in model.trees_]},
        }
    if isinstance(model, GbdtModel):
        return {
            "model_kind": "gbdt",
            "hyperparameters": {
                "learning_rate": model.learning_rate,
                "n_rounds": model.n_rounds,
                "max_depth": model.max_depth,
                "seed": model.seed,
            },
            "classes": model.classes_,
            "parameters": {
                "base_scores": _arr(model.base_scores_),
                "rounds": [[t.to_dict() for t in rnd] for rnd in model.trees_],
            },
        }
    # Neural networks provide their own envelope.
    if hasattr(model, "to_dict"):
        return model.to_dict()
    raise TypeError(f"cannot serialize model of type {type(model).__name__}")


def model_from_dict(d: dict):
    kind = d["model_kind"]
    params = d.get("parameters", {})
    hyper = d.get("hyperparameters", {})
    if kind == "knn":
        model = KnnModel(k=hyper["k"])
        model.classes_ = [int(c) for c in d["classes"]]
        model.X_ = np.asarray(params["train_X"], dtype=np.float64)
        model.y_idx_ = np.asarray(params["train_y_idx"], dtype=np.int64)
        model._train_sq = np.einsum("ij,ij->i", model.X_, model.X_)
        return model
    if kind in ("logreg", "linsvm"):
        model = LinearModel(
            loss_kind=hyper["loss_kind"],
            l2_lambda=hyper["l2_lambda"],
            step_sizes=tuple(hyper["step_sizes"]),
            max_epochs=hyper["max_epochs"],
        )
        model.classes_ = [int(c) for c in d["classes"]]
        model.weights_ = np.asarray(params["weights"], dtype=np.float64)
        model.biases_ = np.asarray(params["biases"], dtype=np.float64)
        return model
    if kind == "nb":
        model = GaussianNbModel()
        model.classes_ = [int(c) for c in d["classes"]]
        model.log_priors_ = np.asarray(params["log_priors"], dtype=np.float64)
        model.means_ = np.asarray(params["means"], dtype=np.float64)
        model.variances_ = np.asarray(params["variances"], dtype=np.float64)
        return model
    if kind == "rf":
        model = RandomForestModel(
            n_estimators=hyper["n_estimators"],
            max_depth=hyper["max_depth"],
            seed=hyper["seed"],
            feature_subset_size=hyper["feature_subset_size"],
            bootstrap=hyper["bootstrap"],
        )
        model.classes_ = [int(c) for c in d["classes"]]
        model.trees_ = [DecisionTree.from_dict(t) for t in params["trees"]]
        return model
    if kind == "gbdt":
        model = GbdtModel(
            learning_rate=hyper["learning_rate"],
            n_rounds=hyper["n_rounds"],
            max_depth=hyper["max_depth"],
            seed=hyper["seed"],
        )
        model.classes_ = [int(c) for c in d["classes"]]
        model.base_scores_ = np.asarray(params["base_scores"], dtype=np.float64)
        model.trees_ = [[DecisionTree.from_dict(t) for t in rnd] for rnd in params["rounds"]]
        return model
    if kind in ("cnn", "gru", "lstm"):
        from eegbench.nn.networks import network_from_dict

        return network_from_dict(d)
    raise ValueError(f"unknown model kind {kind!r}")


def save_model(model, path: str | Path, **context) -> None:
    """Write the model envelope plus run context (scaler, label scheme, seed)."""
    envelope = model_to_dict(model)
    envelope.update(context)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(envelope, fh, sort_keys=True)


def load_model(path: str | Path):
    with open(path, encoding="utf-8") as fh:
        envelope = json.load(fh)
    return model_from_dict(envelope), envelope
