"""Metrics, cross-validation protocols, label-noise injection.

Three protocols are provided:

- ``imbalance_auc``: stratified k-fold CV on a binary task, reporting the
  per-fold AUC of the minority class.
- ``regression_rmse``: repeated 2-fold CV; per fold the ensemble is
  trained to a maximum iteration count and truncated at the prefix with
  the lowest RMSE on the held-out fold.
- ``noise_accuracy``: stratified 10-fold CV with a fraction of the
  training-fold labels replaced at random, reporting per-fold accuracy.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .boosting import (
    BoostConfig,
    Ensemble,
    fit_classifier,
    predict_batch,
    train,
)
from .data import Dataset, child_seed, kfold_indices
from .errors import DataError
from .simplex import build_encoding, encode_many
from .wavelets import predict_mterm_batch

__all__ = [
    "EvalReport",
    "auc_binary",
    "rmse",
    "misclassification_rate",
    "inject_label_noise",
    "best_k_truncation",
    "run_protocol",
]

PROTOCOLS = ("imbalance_auc", "regression_rmse", "noise_accuracy")


@dataclass
class EvalReport:
    protocol: str
    per_fold: List[float]
    mean: float
    std: float
    config: dict
    seed: int

    def to_json(self) -> str:
        return json.dumps(
            {
                "protocol": self.protocol,
                "per_fold": self.per_fold,
                "mean": self.mean,
                "std": self.std,
                "config": self.config,
                "seed": self.seed,
            },
            indent=2,
        )

    def to_table(self) -> str:
        lines = [f"protocol: {self.protocol}  (seed {self.seed})"]
        for i, v in enumerate(self.per_fold):
            lines.append(f"  fold {i:3d}: {v:.6f}")
        lines.append(f"  mean {self.mean:.6f}  std {self.std:.6f}")
        return "\n".join(lines)


def _make_report(protocol, values, config, seed) -> EvalReport:
    values = [float(v) for v in values]
    mean = float(np.mean(values))
    # Sample standard deviation, matching the +- figures usually reported.
    std = float(np.std(values, ddof=1)) if len(values) > 1 else 0.0
    return EvalReport(
        protocol=protocol,
        per_fold=values,
        mean=mean,
        std=std,
        config=config,
        seed=seed,
    )


def auc_binary(scores: Sequence[float], is_positive: Sequence[bool]) -> float:
    """Mann-Whitney AUC: P(random positive outscores a random negative),
    counting ties as half. Higher score must mean more positive."""
    s = np.asarray(scores, dtype=np.float64)
    pos = np.asarray(is_positive, dtype=bool)
    n_pos = int(pos.sum())
    n_neg = int(len(pos) - n_pos)
    if n_pos == 0 or n_neg == 0:
        raise DataError("AUC needs both classes present")
    # Average ranks (ties shared) via counts of unique score values.
    uniq, inv, counts = np.unique(s, return_inverse=True, return_counts=True)
    ends = np.cumsum(counts)
    avg_rank = ends - (counts - 1) / 2.0  # 1-based average rank per value
    rank_sum_pos = float(avg_rank[inv[pos]].sum())
    u = rank_sum_pos - n_pos * (n_pos + 1) / 2.0
    return u / (n_pos * n_neg)


def rmse(pred: Sequence[float], truth: Sequence[float]) -> float:
    p = np.asarray(pred, dtype=np.float64)
    t = np.asarray(truth, dtype=np.float64)
    if p.shape != t.shape or p.size == 0:
        raise DataError("pred and truth must be non-empty with equal shape")
    return float(np.sqrt(np.mean((p - t) ** 2)))


def misclassification_rate(pred_labels, true_labels) -> float:
    if len(pred_labels) != len(true_labels):
        raise DataError("label sequences must have equal length")
    wrong = sum(1 for p, t in zip(pred_labels, true_labels) if p != t)
    return wrong / len(true_labels)


def inject_label_noise(labels, noise_level: float, seed: int):
    """Replace a random round(noise_level*m) subset of labels with a
    uniformly random different label. Deterministic per seed."""
    if not 0.0 <= noise_level < 1.0:
        raise DataError("noise_level must be in [0, 1)")
    labels = list(labels)
    classes = sorted(set(labels))
    if len(classes) < 2:
        raise DataError("label noise needs at least 2 classes")
    m = len(labels)
    n_flip = int(round(noise_level * m))
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    flip = rng.choice(m, size=n_flip, replace=False)
    for i in flip:
        others = [c for c in classes if c != labels[i]]
        labels[i] = others[rng.integers(len(others))]
    return labels


def best_k_truncation(ensemble: Ensemble, X_val, y_val):
    """Find the stage-prefix length with the lowest validation RMSE.

    Evaluates k = 0..K incrementally, adding one stage's contribution per
    step; k = 0 is the initial constant alone. Ties go to the smallest k.
    """
    X = np.asarray(X_val, dtype=np.float64)
    Y = np.asarray(y_val, dtype=np.float64)
    if Y.ndim == 1:
        Y = Y[:, None]
    if X.shape[0] == 0:
        raise DataError("empty validation set")
    pred = np.tile(ensemble.f0, (X.shape[0], 1))
    best_k = 0
    best_rmse = float(np.sqrt(np.mean((Y - pred) ** 2)))
    for k, stage in enumerate(ensemble.stages, start=1):
        pred = pred + ensemble.nu * predict_mterm_batch(
            stage.tree, stage.order, stage.m_terms, X
        )
        r = float(np.sqrt(np.mean((Y - pred) ** 2)))
        if r < best_rmse:
            best_k, best_rmse = k, r
    return best_k, best_rmse


def _minority_label(labels) -> str:
    classes, counts = np.unique(np.asarray(labels), return_counts=True)
    # np.unique sorts, so equal counts resolve to the lexicographically first.
    return str(classes[np.argmin(counts)])


def _binary_scores(ensemble: Ensemble, X, positive_label) -> np.ndarray:
    """Scalar scores oriented so that larger means more like the positive
    class (P=2: the single predicted coordinate, sign-adjusted)."""
    enc = ensemble.encoding
    if enc is None or enc.class_count != 2:
        raise DataError("binary scores require a 2-class ensemble")
    points = predict_batch(ensemble, X)
    sign = 1.0 if enc.label_order[0] == positive_label else -1.0
    return sign * points[:, 0]


def run_protocol(
    dataset: Dataset,
    protocol: str,
    config: BoostConfig,
    seed: int,
    folds: int = 5,
    trials: int = 20,
    noise_level: float = 0.1,
    external_folds=None,
) -> EvalReport:
    """Execute one evaluation protocol end to end.

    ``external_folds`` replaces generated folds with pre-made (train, test)
    index pairs (e.g. loaded via ``data.load_folds``); it applies to the
    fold-based protocols only.
    """
    if protocol not in PROTOCOLS:
        raise DataError(f"unknown protocol {protocol!r}")
    cfg_echo = {
        "protocol": protocol,
        "folds": folds,
        "trials": trials,
        "noise_level": noise_level,
        "iterations": config.iterations,
        "nu": config.nu,
        "max_depth": config.max_depth,
        "subsample_fraction": config.subsample_fraction,
        "min_leaf": config.min_leaf,
    }

    if protocol == "imbalance_auc":
        if dataset.task != "classification":
            raise DataError("imbalance_auc requires a classification dataset")
        positive = _minority_label(dataset.raw_labels)
        pairs = external_folds or kfold_indices(
            dataset, folds, child_seed(seed, 0), stratified=True
        )
        values = []
        for f, (train_idx, test_idx) in enumerate(pairs):
            sub = dataset.take(train_idx)
            cfg = BoostConfig(
                iterations=config.iterations,
                nu=config.nu,
                max_depth=config.max_depth,
                subsample_fraction=config.subsample_fraction,
                min_leaf=config.min_leaf,
                seed=child_seed(seed, 1, f),
                task="classification",
            )
            ensemble = fit_classifier(sub, cfg)
            scores = _binary_scores(ensemble, dataset.features[test_idx], positive)
            is_pos = [dataset.raw_labels[i] == positive for i in test_idx]
            values.append(auc_binary(scores, is_pos))
        return _make_report(protocol, values, cfg_echo, seed)

    if protocol == "regression_rmse":
        if dataset.task != "regression":
            raise DataError("regression_rmse requires a regression dataset")
        values = []
        for t in range(trials):
            pairs = kfold_indices(dataset, 2, child_seed(seed, 2, t))
            for f, (train_idx, test_idx) in enumerate(pairs):
                sub = dataset.take(train_idx)
                cfg = BoostConfig(
                    iterations=config.iterations,
                    nu=config.nu,
                    max_depth=config.max_depth,
                    subsample_fraction=config.subsample_fraction,
                    min_leaf=config.min_leaf,
                    seed=child_seed(seed, 3, t, f),
                    task="regression",
                )
                ensemble = train(sub, cfg)
                _, best = best_k_truncation(
                    ensemble,
                    dataset.features[test_idx],
                    dataset.response[test_idx],
                )
                values.append(best)
        return _make_report(protocol, values, cfg_echo, seed)

    # noise_accuracy
    if dataset.task != "classification":
        raise DataError("noise_accuracy requires a classification dataset")
    pairs = external_folds or kfold_indices(
        dataset, folds, child_seed(seed, 4), stratified=True
    )
    values = []
    for f, (train_idx, test_idx) in enumerate(pairs):
        noisy = inject_label_noise(
            [dataset.raw_labels[i] for i in train_idx],
            noise_level,
            child_seed(seed, 5, f),
        )
        enc = build_encoding(dataset.raw_labels)
        sub = dataset.take(train_idx)
        sub = Dataset(
            features=sub.features,
            response=encode_many(noisy, enc),
            feature_names=sub.feature_names,
            sample_ids=sub.sample_ids,
            task="classification",
            raw_labels=tuple(noisy),
        )
        cfg = BoostConfig(
            iterations=config.iterations,
            nu=config.nu,
            max_depth=config.max_depth,
            subsample_fraction=config.subsample_fraction,
            min_leaf=config.min_leaf,
            seed=child_seed(seed, 6, f),
            task="classification",
        )
        ensemble = train(sub, cfg)
        ensemble.encoding = enc
        points = predict_batch(ensemble, dataset.features[test_idx])
        pred_labels = [
            enc.label_order[int(np.argmax(enc.vertices @ p))] for p in points
        ]
        truth = [dataset.raw_labels[i] for i in test_idx]
        values.append(1.0 - misclassification_rate(pred_labels, truth))
    return _make_report("noise_accuracy", values, cfg_echo, seed)
