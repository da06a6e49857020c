"""Gradient boosting with wavelet-pruned deep trees.

Each iteration fits a deep CART tree to the current residuals on a random
in-bag subset, sorts the tree's wavelets by norm, and keeps the M-term
prefix whose squared error on the out-of-bag rows is smallest. Stages
accumulate with a fixed shrinkage step.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from .data import Dataset, child_seed, subsample
from .errors import DataError
from .simplex import SimplexEncoding, binary_score, decode
from .tree import WaveletTree, fit_tree
from .wavelets import (
    WaveletOrder,
    mterm_loss_curve,
    predict_mterm_batch,
    sort_wavelets,
)

__all__ = [
    "BoostConfig",
    "Stage",
    "Ensemble",
    "init_constant",
    "train",
    "select_m",
    "predict",
    "predict_batch",
    "predict_labels",
]


@dataclass(frozen=True)
class BoostConfig:
    iterations: int = 10
    nu: float = 0.1
    max_depth: int = 8
    subsample_fraction: float = 0.8
    min_leaf: int = 1
    seed: int = 0
    task: str = "regression"

    def __post_init__(self):
        if self.iterations < 1:
            raise DataError("iterations must be >= 1")
        if not 0.0 < self.nu <= 1.0:
            raise DataError("nu must be in (0, 1]")
        if self.max_depth < 0:
            raise DataError("max_depth must be >= 0")
        if not 0.0 < self.subsample_fraction <= 1.0:
            raise DataError("subsample_fraction must be in (0, 1]")
        if self.min_leaf < 1:
            raise DataError("min_leaf must be >= 1")
        if self.task not in ("regression", "classification"):
            raise DataError("task must be 'regression' or 'classification'")


@dataclass
class Stage:
    tree: WaveletTree
    order: WaveletOrder
    m_terms: int


@dataclass
class Ensemble:
    f0: np.ndarray  # (d,)
    nu: float
    stages: List[Stage]
    config: BoostConfig
    feature_names: tuple
    encoding: Optional[SimplexEncoding] = None

    @property
    def response_dim(self) -> int:
        return len(self.f0)


def init_constant(Y: np.ndarray) -> np.ndarray:
    """Column-wise mean: the constant minimizing total squared error."""
    Y = np.asarray(Y, dtype=np.float64)
    if Y.ndim == 1:
        Y = Y[:, None]
    if Y.shape[0] == 0:
        raise DataError("empty response matrix")
    return Y.mean(axis=0)


def select_m(
    order: WaveletOrder,
    tree: WaveletTree,
    oob_X: np.ndarray,
    oob_R: np.ndarray,
) -> int:
    """Pick the M-term prefix minimizing the OOB squared error.

    Ties go to the smallest M (the sparser model).
    """
    curve = mterm_loss_curve(tree, order, oob_X, oob_R)
    best_m, best_loss = curve[0]
    for M, loss in curve[1:]:
        if loss < best_loss:
            best_m, best_loss = M, loss
    return best_m


def train(
    dataset: Dataset,
    config: BoostConfig,
    prune: bool = True,
    log_fn: Optional[Callable[[dict], None]] = None,
) -> Ensemble:
    """Run the boosting loop and return the trained ensemble.

    Classification datasets must arrive with responses already
    simplex-encoded (see ``fit_classifier``). When the subsample fraction
    is 1.0 the OOB set is empty and every stage keeps the full tree; with
    ``prune=False`` M-selection is disabled outright (all wavelets kept),
    which serves as the unpruned baseline in experiments.
    """
    X = dataset.features
    Y = dataset.response
    if Y.shape[1] == 0:
        raise DataError(
            "classification responses must be simplex-encoded before training"
        )
    m = X.shape[0]
    f0 = init_constant(Y)
    F = np.tile(f0, (m, 1))
    stages: List[Stage] = []

    for k in range(1, config.iterations + 1):
        residual = Y - F
        split = subsample(
            m, config.subsample_fraction, child_seed(config.seed, k)
        )
        tree = fit_tree(
            X[split.in_bag],
            residual[split.in_bag],
            config.max_depth,
            config.min_leaf,
        )
        order = sort_wavelets(tree)
        if prune and len(split.oob):
            m_terms = select_m(order, tree, X[split.oob], residual[split.oob])
        else:
            m_terms = tree.n_nodes
        contrib = predict_mterm_batch(tree, order, m_terms, X)
        F = F + config.nu * contrib
        stages.append(Stage(tree=tree, order=order, m_terms=m_terms))
        if log_fn is not None:
            in_bag_res = Y[split.in_bag] - F[split.in_bag]
            entry = {
                "iteration": k,
                "n_nodes": tree.n_nodes,
                "m_terms": m_terms,
                "in_bag_loss": float((in_bag_res ** 2).sum() / len(split.in_bag)),
            }
            if len(split.oob):
                oob_res = Y[split.oob] - F[split.oob]
                entry["oob_loss"] = float((oob_res ** 2).sum() / len(split.oob))
            else:
                entry["oob_loss"] = None
            log_fn(entry)

    return Ensemble(
        f0=f0,
        nu=config.nu,
        stages=stages,
        config=config,
        feature_names=dataset.feature_names,
    )


def predict(ensemble: Ensemble, x) -> np.ndarray:
    """Evaluate the ensemble at one feature vector."""
    return predict_batch(ensemble, np.asarray(x, dtype=np.float64)[None, :])[0]


def predict_batch(ensemble: Ensemble, X: np.ndarray) -> np.ndarray:
    """Evaluate the ensemble over the rows of ``X``.

    Stage contributions are summed in stage order for bit-reproducibility.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise DataError("X must be 2-D")
    if X.shape[1] != len(ensemble.feature_names):
        raise DataError(
            f"feature dimension {X.shape[1]} != {len(ensemble.feature_names)}"
        )
    out = np.tile(ensemble.f0, (X.shape[0], 1))
    for stage in ensemble.stages:
        out += ensemble.nu * predict_mterm_batch(
            stage.tree, stage.order, stage.m_terms, X
        )
    return out


def predict_labels(ensemble: Ensemble, X: np.ndarray, positive_label=None):
    """Decode ensemble predictions into (label, confidence, score) rows.

    ``score`` is the binary ranking score oriented toward
    ``positive_label`` (P=2 only; None otherwise).
    """
    if ensemble.encoding is None:
        raise DataError("predict_labels requires a classification ensemble")
    enc = ensemble.encoding
    points = predict_batch(ensemble, X)
    results = []
    for p in points:
        label, conf, _ = decode(p, enc)
        score = None
        if enc.class_count == 2:
            pos = positive_label if positive_label is not None else enc.label_order[0]
            score = binary_score(p, enc, pos)
        results.append((label, conf, score))
    return results


def truncate(ensemble: Ensemble, k: int) -> Ensemble:
    """The prefix ensemble using only the first ``k`` stages (k=0: f0 alone)."""
    if not 0 <= k <= len(ensemble.stages):
        raise DataError(f"k must be in [0, {len(ensemble.stages)}]")
    return Ensemble(
        f0=ensemble.f0,
        nu=ensemble.nu,
        stages=ensemble.stages[:k],
        config=ensemble.config,
        feature_names=ensemble.feature_names,
        encoding=ensemble.encoding,
    )


def fit_classifier(dataset: Dataset, config: BoostConfig) -> Ensemble:
    """Encode labels onto the regular simplex, train, and attach the encoding."""
    from .simplex import build_encoding, encode_many

    if dataset.task != "classification" or dataset.raw_labels is None:
        raise DataError("fit_classifier requires a classification dataset")
    enc = build_encoding(dataset.raw_labels)
    encoded = dataset.with_response(encode_many(dataset.raw_labels, enc))
    ensemble = train(encoded, config)
    ensemble.encoding = enc
    return ensemble
