"""Grid search over a stratified cross-validation plan.

Cells are enumerated in grid order (itertools.product over the listed
values). Each cell is scored by its mean validation metric over the K fold
rounds; a cell where any fold fit fails is excluded and the failure is kept
in the cell record. Ties go to the earlier cell.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from eegbench.errors import EegBenchError
from eegbench.metrics import accuracy, predicted_labels
from eegbench.preprocessing import FoldPlan


@dataclass
class CellResult:
    params: dict
    fold_scores: list[float] = field(default_factory=list)
    mean_score: float | None = None
    error: str | None = None


@dataclass
class GridSearchResult:
    best_params: dict
    best_score: float | None
    cells: list[CellResult]

    def to_dict(self) -> dict:
        return {
            "best_params": self.best_params,
            "best_score": self.best_score,
            "cells": [
                {
                    "params": c.params,
                    "fold_scores": c.fold_scores,
                    "mean_score": c.mean_score,
                    "error": c.error,
                }
                for c in self.cells
            ],
        }


def default_scorer(model, X_val: np.ndarray, y_val: np.ndarray) -> float:
    proba = model.predict_proba(X_val)
    return accuracy(predicted_labels(proba, model.classes_), y_val)


def expand_grid(param_grid: dict[str, list]) -> list[dict]:
    """All cells in grid order; an empty grid is a single empty cell."""
    if not param_grid:
        return [{}]
    keys = list(param_grid.keys())
    return [dict(zip(keys, combo)) for combo in itertools.product(*param_grid.values())]


def grid_search(
    fit_model: Callable[[dict, np.ndarray, np.ndarray], object],
    param_grid: dict[str, list],
    X: np.ndarray,
    y: np.ndarray,
    fold_plan: FoldPlan,
    scorer: Callable = default_scorer,
) -> GridSearchResult:
    """Score every cell by K-fold CV and return the best one.

    fit_model(params, X_fit, y_fit) must return a fitted classifier;
    X and y are indexed by the plan's absolute fold indices.
    """
    X = np.asarray(X)
    y = np.asarray(y)
    cells = [CellResult(params=params) for params in expand_grid(param_grid)]
    for cell in cells:
        try:
            for i in range(fold_plan.k):
                fit_idx, val_idx = fold_plan.round(i)
                model = fit_model(cell.params, X[fit_idx], y[fit_idx])
                cell.fold_scores.append(float(scorer(model, X[val_idx], y[val_idx])))
            cell.mean_score = float(np.mean(cell.fold_scores))
        except Exception as exc:  # recorded per cell; the sweep continues
            cell.error = f"{type(exc).__name__}: {exc}"
            cell.mean_score = None
    scored = [c for c in cells if c.mean_score is not None]
    if not scored:
        raise EegBenchError("every grid cell failed during cross-validation")
    best = max(scored, key=lambda c: c.mean_score)  # max keeps the earliest on ties
    return GridSearchResult(best_params=dict(best.params), best_score=best.mean_score, cells=cells)
