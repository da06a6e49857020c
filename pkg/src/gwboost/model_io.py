"""Model serialization: a single JSON document per ensemble.

Floats are emitted with Python's shortest round-trip representation, so a
loaded model predicts bit-identically to the one saved. The root node's
+inf norm sentinel is stored as null.
"""

from __future__ import annotations

import json
import os
import tempfile

import numpy as np

from .boosting import BoostConfig, Ensemble, Stage
from .errors import ModelError
from .simplex import build_encoding
from .tree import TreeNode, WaveletTree
from .wavelets import sort_wavelets

__all__ = ["FORMAT_VERSION", "save_model", "load_model", "model_to_dict", "model_from_dict"]

FORMAT_VERSION = 1


def _tree_to_dict(tree: WaveletTree) -> dict:
    nodes = []
    for n in tree.nodes:
        nodes.append(
            {
                "node_id": n.node_id,
                "parent": n.parent,
                "depth": n.depth,
                "feature": None if n.split is None else n.split[0],
                "threshold": None if n.split is None else n.split[1],
                "left": n.left,
                "right": n.right,
                "delta": [float(v) for v in n.wavelet_delta],
                "norm_sq": None
                if np.isinf(n.wavelet_norm_sq)
                else float(n.wavelet_norm_sq),
            }
        )
    return {"max_depth": tree.max_depth, "n_features": tree.n_features, "nodes": nodes}


def _tree_from_dict(d: dict, response_dim: int) -> WaveletTree:
    nodes = []
    for nd in d["nodes"]:
        delta = np.asarray(nd["delta"], dtype=np.float64)
        split = None
        if nd["feature"] is not None:
            split = (int(nd["feature"]), float(nd["threshold"]))
        nodes.append(
            TreeNode(
                node_id=int(nd["node_id"]),
                depth=int(nd["depth"]),
                sample_indices=np.empty(0, dtype=np.int64),
                mean=delta.copy(),  # overwritten below by the path sum
                split=split,
                left=nd["left"],
                right=nd["right"],
                parent=nd["parent"],
                wavelet_delta=delta,
                wavelet_norm_sq=np.inf if nd["norm_sq"] is None else float(nd["norm_sq"]),
            )
        )
    # Means are not stored; rebuild them as the telescoping path sum.
    for n in nodes:
        if n.parent is not None:
            n.mean = nodes[n.parent].mean + n.wavelet_delta
    return WaveletTree(
        nodes=nodes,
        max_depth=int(d["max_depth"]),
        response_dim=response_dim,
        n_features=int(d["n_features"]),
    )


def model_to_dict(ensemble: Ensemble) -> dict:
    cfg = ensemble.config
    doc = {
        "format_version": FORMAT_VERSION,
        "task": cfg.task,
        "feature_names": list(ensemble.feature_names),
        "label_order": None
        if ensemble.encoding is None
        else list(ensemble.encoding.label_order),
        "f0": [float(v) for v in ensemble.f0],
        "nu": float(ensemble.nu),
        "config": {
            "iterations": cfg.iterations,
            "nu": cfg.nu,
            "max_depth": cfg.max_depth,
            "subsample_fraction": cfg.subsample_fraction,
            "min_leaf": cfg.min_leaf,
            "seed": cfg.seed,
            "task": cfg.task,
        },
        "stages": [
            {"tree": _tree_to_dict(s.tree), "m_terms": s.m_terms}
            for s in ensemble.stages
        ],
    }
    return doc


def model_from_dict(doc: dict) -> Ensemble:
    if not isinstance(doc, dict) or "format_version" not in doc:
        raise ModelError("not a model file")
    if doc["format_version"] != FORMAT_VERSION:
        raise ModelError(
            f"unsupported model format_version {doc['format_version']}, "
            f"expected {FORMAT_VERSION}"
        )
    d = len(doc["f0"])
    stages = []
    for s in doc["stages"]:
        tree = _tree_from_dict(s["tree"], d)
        # Norms round-trip exactly, so re-sorting reproduces the stored order.
        stages.append(
            Stage(tree=tree, order=sort_wavelets(tree), m_terms=int(s["m_terms"]))
        )
    config = BoostConfig(**doc["config"])
    ensemble = Ensemble(
        f0=np.asarray(doc["f0"], dtype=np.float64),
        nu=float(doc["nu"]),
        stages=stages,
        config=config,
        feature_names=tuple(doc["feature_names"]),
    )
    if doc.get("label_order"):
        # Vertices are re-derived from the stored label order, not stored.
        ensemble.encoding = build_encoding(doc["label_order"])
    return ensemble


def atomic_write_text(path, text: str) -> None:
    """Write via a temp file in the target directory, then rename."""
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_model(ensemble: Ensemble, path) -> None:
    atomic_write_text(path, json.dumps(model_to_dict(ensemble)) + "\n")


def load_model(path) -> Ensemble:
    if not os.path.exists(path):
        raise ModelError(f"no such model file: {path}")
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as e:
        raise ModelError(f"invalid model JSON: {e}") from None
    return model_from_dict(doc)
