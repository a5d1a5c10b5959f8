"""From-scratch regression suite: CART trees, gradient boosting, random
forest, k-NN, and least squares, with R2 evaluation, sweeps, severity
classes, and versioned model persistence."""

from __future__ import annotations

import numpy as np

from .baselines import (
    ForestModel,
    KnnModel,
    LinearModel,
    apply_scaling,
    fit_knn,
    fit_linear,
    fit_random_forest,
    standardize,
)
from .boosting import GbmModel, fit_gbr
from .classes import CLASS_LETTERS, SIZE_CLASSES, classify_fire_size
from .errors import (
    CorruptModel,
    DegenerateTarget,
    DimensionMismatch,
    EmptySampleSet,
    KTooLarge,
    NegativeSize,
    TooFewSamples,
    UnsupportedVersion,
)
from .metrics import EvalReport, r2_score, train_test_split
from .persistence import load_model, model_fingerprint, save_model
from .sweeps import sweep_depth, sweep_window, write_sweep_csv
from .tree import RegressionTree, TreeNode, fit_tree

__all__ = [
    "ForestModel", "KnnModel", "LinearModel", "GbmModel", "RegressionTree",
    "TreeNode", "EvalReport", "fit_tree", "fit_gbr", "fit_linear", "fit_knn",
    "fit_random_forest", "standardize", "apply_scaling", "predict",
    "r2_score", "train_test_split", "classify_fire_size", "SIZE_CLASSES",
    "CLASS_LETTERS", "save_model", "load_model", "model_fingerprint",
    "sweep_window", "sweep_depth", "write_sweep_csv",
    "CorruptModel", "DegenerateTarget", "DimensionMismatch", "EmptySampleSet",
    "KTooLarge", "NegativeSize", "TooFewSamples", "UnsupportedVersion",
]


def predict(model, x):
    """Apply any fitted model to one feature vector or a sample matrix.

    A single vector returns a float; a matrix returns an array.
    """
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 1:
        return float(model.predict(arr.reshape(1, -1))[0])
    return model.predict(arr)
