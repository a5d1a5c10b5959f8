"""Hyperparameter sweeps: window length and tree depth against held-out R2."""

from __future__ import annotations

import csv
from typing import IO, Iterable, Sequence

from ..dataset import JoinedDailyRecord, to_matrix, window_aggregate
from .boosting import fit_gbr
from .metrics import r2_score, train_test_split


def sweep_window(
    rows: Iterable[JoinedDailyRecord],
    w_list: Sequence[int] = tuple(range(1, 22)),
    *,
    stride: int | None = None,
    test_fraction: float = 0.2,
    seed: int = 0,
    n_estimators: int = 150,
    learning_rate: float = 0.01,
    max_depth: int | None = 7,
    min_samples_leaf: int = 1,
) -> list[tuple[int, float]]:
    """Rebuild window samples per w, train a GBR, and score the holdout.

    ``stride`` defaults to each w (disjoint windows).
    """
    rows = list(rows)
    results = []
    for w in w_list:
        samples = window_aggregate(rows, w=w, stride=stride if stride is not None else w)
        X, y = to_matrix(samples)
        X_tr, X_te, y_tr, y_te = train_test_split(X, y, test_fraction=test_fraction, seed=seed)
        model = fit_gbr(
            X_tr, y_tr, n_estimators=n_estimators, learning_rate=learning_rate,
            max_depth=max_depth, min_samples_leaf=min_samples_leaf,
        )
        results.append((w, r2_score(y_te, model.predict(X_te))))
    return results


def sweep_depth(
    X,
    y,
    depth_list: Sequence[int],
    *,
    test_fraction: float = 0.2,
    seed: int = 0,
    n_estimators: int = 150,
    learning_rate: float = 0.01,
    min_samples_leaf: int = 1,
) -> list[tuple[int, float]]:
    """Score a GBR per max_depth on one fixed holdout split."""
    X_tr, X_te, y_tr, y_te = train_test_split(X, y, test_fraction=test_fraction, seed=seed)
    results = []
    for depth in depth_list:
        model = fit_gbr(
            X_tr, y_tr, n_estimators=n_estimators, learning_rate=learning_rate,
            max_depth=depth, min_samples_leaf=min_samples_leaf,
        )
        results.append((depth, r2_score(y_te, model.predict(X_te))))
    return results


def write_sweep_csv(pairs: Iterable[tuple[int, float]], stream: IO[str]) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(["parameter", "r2"])
    for param, r2 in pairs:
        w.writerow([param, repr(float(r2))])
