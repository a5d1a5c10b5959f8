"""CART regression trees: greedy binary splitting on squared error.

Split candidates are midpoints between consecutive distinct sorted values
of each feature; the winning split minimizes the summed SSE of the two
children, with ties broken toward the lowest feature index and then the
lowest threshold. Routing is "go left iff x[feature] <= threshold".

Fitting presorts each feature once and keeps the orderings through stable
partitioning, so split search per node is linear in the node size.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, EmptySampleSet


@dataclass
class TreeNode:
    value: float  # mean of the training targets that reached this node
    feature: int | None = None
    threshold: float = 0.0
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.feature is None


@dataclass
class RegressionTree:
    root: TreeNode
    n_features: int
    max_depth: int | None
    min_samples_leaf: int

    def predict(self, X) -> np.ndarray:
        X = _as_matrix(X, self.n_features)
        out = np.empty(X.shape[0], dtype=float)
        stack = [(self.root, np.arange(X.shape[0]))]
        while stack:
            node, idx = stack.pop()
            if idx.size == 0:
                continue
            if node.is_leaf:
                out[idx] = node.value
            else:
                go_left = X[idx, node.feature] <= node.threshold
                stack.append((node.left, idx[go_left]))
                stack.append((node.right, idx[~go_left]))
        return out


def _as_matrix(X, n_features: int | None = None) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if X.ndim != 2:
        raise ValueError(f"expected 2-D sample matrix, got shape {X.shape}")
    if n_features is not None and X.shape[1] != n_features:
        raise DimensionMismatch(f"expected {n_features} features, got {X.shape[1]}")
    return X


def _best_split(X, y, orders, min_samples_leaf):
    """Scan all features of one node; returns (sse, feature, pos, threshold)
    of the winning split or None when no valid split exists."""
    m = orders.shape[1]
    best = None
    for j in range(orders.shape[0]):
        oj = orders[j]
        v = X[oj, j]
        yo = y[oj]
        cs = np.cumsum(yo)
        cq = np.cumsum(yo * yo)
        n_left = np.arange(1, m)
        valid = v[:-1] < v[1:]
        if min_samples_leaf > 1:
            valid &= (n_left >= min_samples_leaf) & (m - n_left >= min_samples_leaf)
        if not valid.any():
            continue
        sum_left = cs[:-1]
        sq_left = cq[:-1]
        with np.errstate(invalid="ignore"):
            sse = (
                sq_left - sum_left * sum_left / n_left
                + (cq[-1] - sq_left) - (cs[-1] - sum_left) ** 2 / (m - n_left)
            )
        sse = np.where(valid, sse, np.inf)
        k = int(np.argmin(sse))  # first minimum: lowest threshold wins
        if best is None or sse[k] < best[0]:
            best = (float(sse[k]), j, k, (v[k] + v[k + 1]) / 2.0)
    return best


def fit_tree(X, y, max_depth: int | None = None, min_samples_leaf: int = 1) -> RegressionTree:
    """Fit a regression tree by greedy SSE splitting.

    A node becomes a leaf when the depth limit is reached, it holds fewer
    than 2*min_samples_leaf samples, its targets are constant, or no split
    strictly reduces SSE. Leaf values are target means.
    """
    X = _as_matrix(X)
    y = np.asarray(y, dtype=float)
    n, f = X.shape
    if n == 0:
        raise EmptySampleSet("cannot fit a tree on zero samples")
    if y.shape != (n,):
        raise ValueError(f"y has shape {y.shape}, expected ({n},)")
    if min_samples_leaf < 1:
        raise ValueError("min_samples_leaf must be >= 1")

    root_orders = np.argsort(X, axis=0, kind="stable").T.copy()  # (f, n)
    in_left = np.zeros(n, dtype=bool)

    root = None
    stack = [(root_orders, 0, None, "")]
    while stack:
        orders, depth, parent, side = stack.pop()
        idx = orders[0]
        m = idx.size
        ysub = y[idx]
        total = float(ysub.sum())
        value = total / m

        split = None
        depth_ok = max_depth is None or depth < max_depth
        if depth_ok and m >= 2 * min_samples_leaf and ysub.max() > ysub.min():
            split = _best_split(X, y, orders, min_samples_leaf)
            if split is not None:
                node_sse = float(np.dot(ysub, ysub)) - total * total / m
                if not split[0] < node_sse:
                    split = None

        if split is None:
            node = TreeNode(value=value)
        else:
            _, j, k, threshold = split
            node = TreeNode(value=value, feature=j, threshold=float(threshold))
            left_rows = orders[j][: k + 1]
            in_left[left_rows] = True
            left_orders = np.empty((f, k + 1), dtype=orders.dtype)
            right_orders = np.empty((f, m - k - 1), dtype=orders.dtype)
            for jj in range(f):
                mask = in_left[orders[jj]]
                left_orders[jj] = orders[jj][mask]
                right_orders[jj] = orders[jj][~mask]
            in_left[left_rows] = False
            stack.append((left_orders, depth + 1, node, "left"))
            stack.append((right_orders, depth + 1, node, "right"))

        if parent is None:
            root = node
        elif side == "left":
            parent.left = node
        else:
            parent.right = node

    return RegressionTree(root=root, n_features=f, max_depth=max_depth,
                          min_samples_leaf=min_samples_leaf)
