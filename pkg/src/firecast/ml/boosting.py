"""Gradient boosting for regression: depth-limited CART trees fit to
residuals under squared-error loss, shrunk by a learning rate."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .baselines import apply_scaling, standardize
from .errors import TooFewSamples
from .tree import RegressionTree, _as_matrix, fit_tree


@dataclass
class GbmModel:
    base_prediction: float
    trees: list[RegressionTree]
    learning_rate: float
    n_features: int
    max_depth: int | None
    min_samples_leaf: int
    feature_names: list[str] | None = None
    scaling: tuple[list[float], list[float]] | None = None
    # Training SSE after each boosting stage; diagnostic, not persisted.
    stage_train_sse: list[float] = field(default_factory=list, repr=False, compare=False)

    def predict(self, X) -> np.ndarray:
        X = _as_matrix(X, self.n_features)
        if self.scaling is not None:
            X = apply_scaling(X, self.scaling)
        out = np.full(X.shape[0], self.base_prediction, dtype=float)
        for tree in self.trees:
            out += self.learning_rate * tree.predict(X)
        return out


def fit_gbr(
    X,
    y,
    n_estimators: int = 150,
    learning_rate: float = 0.01,
    max_depth: int | None = 7,
    min_samples_leaf: int = 1,
    seed: int | None = None,
    feature_names: list[str] | None = None,
    scale_features: bool = False,
) -> GbmModel:
    """Fit a gradient boosting regressor.

    F0 is the target mean; each stage fits a tree to the current residuals
    and adds learning_rate times its output. Training SSE is recorded per
    stage and is non-increasing for learning_rate in (0, 1]. The fit is
    deterministic; ``seed`` is accepted for interface symmetry with the
    randomized models.
    """
    del seed
    X = _as_matrix(X)
    y = np.asarray(y, dtype=float)
    n = X.shape[0]
    if n < 2:
        raise TooFewSamples(f"need >= 2 samples, got {n}")
    if not 0.0 < learning_rate <= 1.0:
        raise ValueError(f"learning_rate out of (0, 1]: {learning_rate!r}")
    if n_estimators < 0:
        raise ValueError("n_estimators must be >= 0")

    scaling = None
    X_fit = X
    if scale_features:
        X_fit, mean, std = standardize(X)
        scaling = (mean.tolist(), std.tolist())

    base = float(y.mean())
    current = np.full(n, base, dtype=float)
    trees: list[RegressionTree] = []
    stage_sse: list[float] = []
    for _ in range(n_estimators):
        residuals = y - current
        tree = fit_tree(X_fit, residuals, max_depth=max_depth, min_samples_leaf=min_samples_leaf)
        current += learning_rate * tree.predict(X_fit)
        trees.append(tree)
        stage_sse.append(float(np.sum((y - current) ** 2)))

    return GbmModel(
        base_prediction=base,
        trees=trees,
        learning_rate=learning_rate,
        n_features=X.shape[1],
        max_depth=max_depth,
        min_samples_leaf=min_samples_leaf,
        feature_names=list(feature_names) if feature_names else None,
        scaling=scaling,
        stage_train_sse=stage_sse,
    )
