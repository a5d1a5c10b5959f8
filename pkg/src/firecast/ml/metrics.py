"""Evaluation: R-squared and the seeded holdout split."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateTarget


def r2_score(y_true, y_pred) -> float:
    """Coefficient of determination: 1 - SSE / SST."""
    y_true = np.asarray(y_true, dtype=float)
    y_pred = np.asarray(y_pred, dtype=float)
    if y_true.shape != y_pred.shape or y_true.ndim != 1:
        raise ValueError(f"shape mismatch: {y_true.shape} vs {y_pred.shape}")
    if y_true.size < 2:
        raise ValueError("need at least 2 values")
    sst = float(np.sum((y_true - y_true.mean()) ** 2))
    if sst == 0.0:
        raise DegenerateTarget("all target values are equal")
    sse = float(np.sum((y_true - y_pred) ** 2))
    return 1.0 - sse / sst


def train_test_split(X, y, test_fraction: float = 0.2, seed: int = 0):
    """Seeded uniform shuffle, then split; parts are disjoint and exhaustive.

    The test part gets floor(n * test_fraction) samples, at least 1, at
    most n - 1. Returns (X_train, X_test, y_train, y_test).
    """
    if not 0.0 < test_fraction < 1.0:
        raise ValueError(f"test_fraction out of (0,1): {test_fraction!r}")
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n = X.shape[0]
    if n < 2:
        raise ValueError("need at least 2 samples to split")
    perm = np.random.default_rng(seed).permutation(n)
    n_test = min(max(1, int(n * test_fraction)), n - 1)
    test_idx = perm[:n_test]
    train_idx = perm[n_test:]
    return X[train_idx], X[test_idx], y[train_idx], y[test_idx]


@dataclass(frozen=True)
class EvalReport:
    model: str
    hyperparameters: dict
    r2: float
    train_size: int
    test_size: int
    seed: int

    def __post_init__(self):
        if self.r2 > 1.0:
            raise ValueError(f"r2 cannot exceed 1: {self.r2!r}")

    def rows(self) -> list[tuple[str, str]]:
        """Key/value rows for the report CSV."""
        out = [
            ("model", self.model),
            ("r2", repr(self.r2)),
            ("train_size", str(self.train_size)),
            ("test_size", str(self.test_size)),
            ("seed", str(self.seed)),
        ]
        for key in sorted(self.hyperparameters):
            out.append((f"param_{key}", str(self.hyperparameters[key])))
        return out
