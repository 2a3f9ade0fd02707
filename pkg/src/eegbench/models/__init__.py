"""Six classical probabilistic classifiers plus grid search.

Every model follows the same contract: ``fit(X, y, ...)`` on scaled feature
rows, ``predict_proba(X)`` returning one probability row per record (entries
in [0, 1], each row summing to 1), with ``classes_`` giving the column order.
"""

from eegbench.models.base import Classifier, check_proba
from eegbench.models.boosting import GbdtModel
from eegbench.models.forest import RandomForestModel
from eegbench.models.grid import GridSearchResult, grid_search
from eegbench.models.knn import KnnModel
from eegbench.models.linear import LinearModel
from eegbench.models.naive_bayes import GaussianNbModel
from eegbench.models.serialize import load_model, model_from_dict, model_to_dict, save_model
from eegbench.models.tree import DecisionTree

__all__ = [
    "Classifier",
    "check_proba",
    "DecisionTree",
    "GaussianNbModel",
    "GbdtModel",
    "GridSearchResult",
    "grid_search",
    "KnnModel",
    "LinearModel",
    "RandomForestModel",
    "load_model",
    "model_from_dict",
    "model_to_dict",
    "save_model",
]
