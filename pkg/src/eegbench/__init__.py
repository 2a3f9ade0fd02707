"""Seizure-detection benchmark on one-second EEG voltage chunks.

A small, fully seeded stack: CSV ingestion, min-max scaling and stratified
splitting, six classical classifiers, a reverse-mode tensor engine with the
CNN/GRU/LSTM architectures used in the study, ROC-AUC and precision metrics,
and a config-driven experiment runner that regenerates the benchmark tables
and figures.
"""

__version__ = "0.1.0"

from eegbench.dataset import ClassLabel, EegDataset, EegRecord, load_csv

__all__ = ["ClassLabel", "EegDataset", "EegRecord", "load_csv", "__version__"]
