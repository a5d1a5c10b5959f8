"""Versioned model artifacts.

A model is saved as a JSON document with a schema_version, the model type,
its hyperparameters, the ordered feature names, the scaling table, and,
for tree ensembles, one flattened pre-order node list per tree. Floats are
serialized with full precision, so a load/save round trip predicts
identically.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from .baselines import ForestModel, KnnModel, LinearModel
from .boosting import GbmModel
from .errors import CorruptModel, UnsupportedVersion
from .tree import RegressionTree, TreeNode

SCHEMA_VERSION = 1


def _flatten_tree(root: TreeNode) -> list[dict]:
    nodes: list[dict] = []

    def visit(node: TreeNode) -> int:
        nid = len(nodes)
        if node.is_leaf:
            nodes.append({"id": nid, "value": node.value})
        else:
            entry = {"id": nid, "feature": node.feature, "threshold": node.threshold}
            nodes.append(entry)
            entry["left"] = visit(node.left)
            entry["right"] = visit(node.right)
        return nid

    visit(root)
    return nodes


def _rebuild_tree(payload: dict) -> RegressionTree:
    raw_nodes = payload["nodes"]
    if not raw_nodes:
        raise CorruptModel("tree with no nodes")
    built: dict[int, TreeNode] = {}
    for raw in raw_nodes:
        nid = raw["id"]
        if "value" in raw:
            built[nid] = TreeNode(value=float(raw["value"]))
        else:
            built[nid] = TreeNode(value=0.0, feature=int(raw["feature"]),
                                  threshold=float(raw["threshold"]))
    for raw in raw_nodes:
        if "value" not in raw:
            node = built[raw["id"]]
            try:
                node.left = built[raw["left"]]
                node.right = built[raw["right"]]
            except KeyError as e:
                raise CorruptModel(f"dangling child id {e}") from None
    if 0 not in built:
        raise CorruptModel("missing root node id 0")
    return RegressionTree(
        root=built[0],
        n_features=int(payload["n_features"]),
        max_depth=payload.get("max_depth"),
        min_samples_leaf=int(payload.get("min_samples_leaf", 1)),
    )


def _tree_payload(tree: RegressionTree) -> dict:
    return {
        "nodes": _flatten_tree(tree.root),
        "n_features": tree.n_features,
        "max_depth": tree.max_depth,
        "min_samples_leaf": tree.min_samples_leaf,
    }


def _model_document(model) -> dict:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "feature_names": getattr(model, "feature_names", None),
    }
    if isinstance(model, GbmModel):
        doc.update({
            "model_type": "gbr",
            "hyperparameters": {
                "n_estimators": len(model.trees),
                "learning_rate": model.learning_rate,
                "max_depth": model.max_depth,
                "min_samples_leaf": model.min_samples_leaf,
            },
            "scaling": list(model.scaling) if model.scaling else None,
            "base_prediction": model.base_prediction,
            "learning_rate": model.learning_rate,
            "n_features": model.n_features,
            "trees": [_tree_payload(t) for t in model.trees],
        })
    elif isinstance(model, RegressionTree):
        doc.update({
            "model_type": "tree",
            "hyperparameters": {
                "max_depth": model.max_depth,
                "min_samples_leaf": model.min_samples_leaf,
            },
            "scaling": None,
            "tree": _tree_payload(model),
        })
    elif isinstance(model, ForestModel):
        doc.update({
            "model_type": "forest",
            "hyperparameters": {
                "n_trees": len(model.trees),
                "max_depth": model.max_depth,
                "min_samples_leaf": model.min_samples_leaf,
                "seed": model.seed,
                "bootstrap": model.bootstrap,
            },
            "scaling": None,
            "n_features": model.n_features,
            "trees": [_tree_payload(t) for t in model.trees],
        })
    elif isinstance(model, LinearModel):
        doc.update({
            "model_type": "linear",
            "hyperparameters": {},
            "scaling": list(model.scaling),
            "coef": list(np.asarray(model.coef, dtype=float)),
            "intercept": model.intercept,
            "n_features": model.n_features,
        })
    elif isinstance(model, KnnModel):
        doc.update({
            "model_type": "knn",
            "hyperparameters": {"k": model.k},
            "scaling": list(model.scaling),
            "train_x": np.asarray(model.train_x, dtype=float).tolist(),
            "train_y": np.asarray(model.train_y, dtype=float).tolist(),
            "n_features": model.n_features,
        })
    else:
        raise TypeError(f"cannot persist model of type {type(model).__name__}")
    return doc


def save_model(model, path: str | Path) -> None:
    """Write a model artifact; see module docstring for the format."""
    doc = _model_document(model)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(doc, f, sort_keys=True, indent=1)
        f.write("\n")


def load_model(path: str | Path):
    """Load a model artifact saved by save_model."""
    try:
        with open(path, encoding="utf-8") as f:
            doc = json.load(f)
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        raise CorruptModel(f"unreadable model artifact: {e}") from None
    if not isinstance(doc, dict) or "schema_version" not in doc:
        raise CorruptModel("missing schema_version")
    if doc["schema_version"] != SCHEMA_VERSION:
        raise UnsupportedVersion(f"schema_version {doc['schema_version']!r}")
    try:
        kind = doc["model_type"]
        feature_names = doc.get("feature_names")
        if kind == "gbr":
            hp = doc["hyperparameters"]
            return GbmModel(
                base_prediction=float(doc["base_prediction"]),
                trees=[_rebuild_tree(t) for t in doc["trees"]],
                learning_rate=float(doc["learning_rate"]),
                n_features=int(doc["n_features"]),
                max_depth=hp.get("max_depth"),
                min_samples_leaf=int(hp.get("min_samples_leaf", 1)),
                feature_names=feature_names,
                scaling=tuple(doc["scaling"]) if doc.get("scaling") else None,
            )
        if kind == "tree":
            return _rebuild_tree(doc["tree"])
        if kind == "forest":
            hp = doc["hyperparameters"]
            return ForestModel(
                trees=[_rebuild_tree(t) for t in doc["trees"]],
                n_features=int(doc["n_features"]),
                max_depth=hp.get("max_depth"),
                min_samples_leaf=int(hp.get("min_samples_leaf", 1)),
                seed=int(hp.get("seed", 0)),
                bootstrap=bool(hp.get("bootstrap", True)),
                feature_names=feature_names,
            )
        if kind == "linear":
            return LinearModel(
                coef=np.asarray(doc["coef"], dtype=float),
                intercept=float(doc["intercept"]),
                scaling=tuple(doc["scaling"]),
                n_features=int(doc["n_features"]),
                feature_names=feature_names,
            )
        if kind == "knn":
            return KnnModel(
                k=int(doc["hyperparameters"]["k"]),
                train_x=np.asarray(doc["train_x"], dtype=float),
                train_y=np.asarray(doc["train_y"], dtype=float),
                scaling=tuple(doc["scaling"]),
                n_features=int(doc["n_features"]),
                feature_names=feature_names,
            )
        raise CorruptModel(f"unknown model_type {kind!r}")
    except (KeyError, TypeError, ValueError) as e:
        if isinstance(e, (CorruptModel, UnsupportedVersion)):
            raise
        raise CorruptModel(f"malformed model artifact: {e}") from None


def model_fingerprint(path: str | Path) -> str:
    """Hex digest of the artifact bytes; identifies the exact trained model."""
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()
