"""Baseline regressors: ordinary least squares, k-nearest-neighbors, and
a bootstrap random forest over the CART base learner.

OLS and k-NN fit on standardized features (recorded at fit time); trees
are affine-invariant and fit raw values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import KTooLarge, TooFewSamples
from .tree import RegressionTree, _as_matrix, fit_tree


def standardize(X) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Z-score each feature; constant features map to zero.

    Returns (scaled, mean, std) where std is the population deviation with
    zeros left in place so the transform can be inverted.
    """
    X = _as_matrix(X)
    if X.shape[0] < 2:
        raise TooFewSamples(f"need >= 2 samples, got {X.shape[0]}")
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    denom = np.where(std == 0.0, 1.0, std)
    return (X - mean) / denom, mean, std


def apply_scaling(X: np.ndarray, scaling: tuple) -> np.ndarray:
    mean = np.asarray(scaling[0], dtype=float)
    std = np.asarray(scaling[1], dtype=float)
    denom = np.where(std == 0.0, 1.0, std)
    return (X - mean) / denom


@dataclass
class LinearModel:
    coef: np.ndarray
    intercept: float
    scaling: tuple[list[float], list[float]]
    n_features: int
    feature_names: list[str] | None = None

    def predict(self, X) -> np.ndarray:
        X = _as_matrix(X, self.n_features)
        return apply_scaling(X, self.scaling) @ self.coef + self.intercept


def fit_linear(X, y, feature_names: list[str] | None = None) -> LinearModel:
    """Least squares with intercept on standardized features.

    Solved by SVD, so rank-deficient designs get the minimum-norm solution.
    """
    X = _as_matrix(X)
    y = np.asarray(y, dtype=float)
    n = X.shape[0]
    if n < 2:
        raise TooFewSamples(f"need >= 2 samples, got {n}")
    Xs, mean, std = standardize(X)
    design = np.column_stack([np.ones(n), Xs])
    beta, *_ = np.linalg.lstsq(design, y, rcond=None)
    return LinearModel(
        coef=beta[1:],
        intercept=float(beta[0]),
        scaling=(mean.tolist(), std.tolist()),
        n_features=X.shape[1],
        feature_names=list(feature_names) if feature_names else None,
    )


@dataclass
class KnnModel:
    k: int
    train_x: np.ndarray  # standardized
    train_y: np.ndarray
    scaling: tuple[list[float], list[float]]
    n_features: int
    feature_names: list[str] | None = None

    def predict(self, X) -> np.ndarray:
        X = _as_matrix(X, self.n_features)
        Xs = apply_scaling(X, self.scaling)
        out = np.empty(Xs.shape[0], dtype=float)
        for i, row in enumerate(Xs):
            d2 = np.sum((self.train_x - row) ** 2, axis=1)
            nearest = np.argsort(d2, kind="stable")[: self.k]  # ties: lowest index
            out[i] = float(self.train_y[nearest].mean())
        return out


def fit_knn(X, y, k: int = 5, feature_names: list[str] | None = None) -> KnnModel:
    """k-nearest-neighbors regression on standardized features."""
    X = _as_matrix(X)
    y = np.asarray(y, dtype=float)
    n = X.shape[0]
    if n < 2:
        raise TooFewSamples(f"need >= 2 samples, got {n}")
    if not 1 <= k <= n:
        raise KTooLarge(f"k={k} with {n} training samples")
    Xs, mean, std = standardize(X)
    return KnnModel(
        k=k, train_x=Xs, train_y=y.copy(),
        scaling=(mean.tolist(), std.tolist()),
        n_features=X.shape[1],
        feature_names=list(feature_names) if feature_names else None,
    )


@dataclass
class ForestModel:
    trees: list[RegressionTree]
    n_features: int
    max_depth: int | None
    min_samples_leaf: int
    seed: int
    bootstrap: bool
    feature_names: list[str] | None = None

    def predict(self, X) -> np.ndarray:
        X = _as_matrix(X, self.n_features)
        out = np.zeros(X.shape[0], dtype=float)
        for tree in self.trees:
            out += tree.predict(X)
        return out / len(self.trees)


def fit_random_forest(
    X,
    y,
    n_trees: int = 100,
    max_depth: int | None = None,
    min_samples_leaf: int = 1,
    seed: int = 0,
    bootstrap: bool = True,
    feature_names: list[str] | None = None,
) -> ForestModel:
    """Bagged CART forest with full-feature splits.

    Each tree draws its bootstrap sample from an independent child seed of
    ``seed``, so results do not depend on fitting order.
    """
    X = _as_matrix(X)
    y = np.asarray(y, dtype=float)
    if n_trees < 1:
        raise ValueError("n_trees must be >= 1")
    n = X.shape[0]
    trees = []
    for child in np.random.SeedSequence(seed).spawn(n_trees):
        if bootstrap:
            idx = np.random.default_rng(child).integers(0, n, size=n)
            trees.append(fit_tree(X[idx], y[idx], max_depth=max_depth,
                                  min_samples_leaf=min_samples_leaf))
        else:
            trees.append(fit_tree(X, y, max_depth=max_depth,
                                  min_samples_leaf=min_samples_leaf))
    return ForestModel(
        trees=trees, n_features=X.shape[1], max_depth=max_depth,
        min_samples_leaf=min_samples_leaf, seed=seed, bootstrap=bootstrap,
        feature_names=list(feature_names) if feature_names else None,
    )
