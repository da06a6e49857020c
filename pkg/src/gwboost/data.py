"""CSV loading, validation and seeded partitioning of tabular datasets.

All randomness in the package flows through numpy's PCG64 generator seeded
from ``numpy.random.SeedSequence``, so every split is reproducible across
platforms for a fixed integer seed.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import DataError

__all__ = [
    "Dataset",
    "SplitPair",
    "load_csv",
    "save_csv",
    "subsample",
    "kfold_indices",
    "save_folds",
    "load_folds",
    "child_seed",
]


def child_seed(*parts: int) -> int:
    """Derive a child seed from an ordered tuple of integers.

    Uses SeedSequence so derived streams are independent and stable across
    platforms; inserting unrelated RNG draws elsewhere cannot perturb them.
    """
    return int(np.random.SeedSequence(list(parts)).generate_state(1)[0])


@dataclass(frozen=True)
class Dataset:
    """An immutable in-memory table of features and responses.

    ``response`` has one column for regression; for classification it stays
    empty (m x 0) until the labels are simplex-encoded, after which it has
    P-1 columns.
    """

    features: np.ndarray
    response: np.ndarray
    feature_names: tuple
    sample_ids: np.ndarray
    task: str
    raw_labels: Optional[tuple] = None

    def __post_init__(self):
        X = np.asarray(self.features, dtype=np.float64)
        Y = np.asarray(self.response, dtype=np.float64)
        if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
            raise DataError("features must be a non-empty 2-D matrix")
        if Y.ndim != 2 or Y.shape[0] != X.shape[0]:
            raise DataError("response row count must match features")
        if not np.isfinite(X).all():
            raise DataError("non-finite value in features")
        if Y.size and not np.isfinite(Y).all():
            raise DataError("non-finite value in response")
        if self.task not in ("regression", "classification"):
            raise DataError("task must be 'regression' or 'classification'")
        if self.task == "regression" and Y.shape[1] != 1:
            raise DataError("regression response must have exactly 1 column")
        if len(self.feature_names) != X.shape[1]:
            raise DataError("feature_names length must match feature count")
        X.setflags(write=False)
        Y.setflags(write=False)
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "response", Y)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        ids = np.asarray(self.sample_ids, dtype=np.int64)
        ids.setflags(write=False)
        object.__setattr__(self, "sample_ids", ids)
        if self.raw_labels is not None:
            object.__setattr__(self, "raw_labels", tuple(self.raw_labels))

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def with_response(self, response: np.ndarray) -> "Dataset":
        """Return a copy carrying a new response matrix (used after encoding)."""
        return replace(self, response=np.asarray(response, dtype=np.float64))

    def take(self, indices: Sequence[int]) -> "Dataset":
        """Row-subset the dataset, preserving original sample_ids."""
        idx = np.asarray(indices, dtype=np.int64)
        labels = None
        if self.raw_labels is not None:
            labels = tuple(self.raw_labels[i] for i in idx)
        return Dataset(
            features=self.features[idx],
            response=self.response[idx] if self.response.size else
            np.empty((len(idx), 0)),
            feature_names=self.feature_names,
            sample_ids=self.sample_ids[idx],
            task=self.task,
            raw_labels=labels,
        )


@dataclass(frozen=True)
class SplitPair:
    """A without-replacement in-bag / out-of-bag index split."""

    in_bag: np.ndarray
    oob: np.ndarray
    seed: int
    fraction: float


def _parse_float(cell: str, row: int, col: str) -> float:
    try:
        v = float(cell)
    except ValueError:
        raise DataError(
            f"non-numeric value {cell!r} at row {row}, column {col!r}"
        ) from None
    if not math.isfinite(v):
        raise DataError(f"non-finite value {cell!r} at row {row}, column {col!r}")
    return v


def load_csv(path, label_column, task: str) -> Dataset:
    """Load a comma-separated, header-first CSV into a Dataset.

    ``label_column`` may be a header name or a 0-based column index. For
    regression the label column becomes the single response column; for
    classification it populates ``raw_labels`` and the response matrix is
    left empty until encoding. Data rows are numbered from 1 in error
    messages (the header is row 0).
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"no such file: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError("empty file: missing header row") from None
        rows = [r for r in reader if r]
    header = [h.strip() for h in header]
    if isinstance(label_column, int) or (
        isinstance(label_column, str) and label_column.lstrip("-").isdigit()
        and label_column not in header
    ):
        li = int(label_column)
        if not 0 <= li < len(header):
            raise DataError(f"label column index {li} out of range")
    else:
        if label_column not in header:
            raise DataError(f"missing label column {label_column!r}")
        li = header.index(label_column)
    if not rows:
        raise DataError("empty data body")

    feature_names = [h for i, h in enumerate(header) if i != li]
    feats = np.empty((len(rows), len(feature_names)), dtype=np.float64)
    labels = []
    for r, row in enumerate(rows, start=1):
        if len(row) != len(header):
            raise DataError(f"row {r} has {len(row)} cells, expected {len(header)}")
        j = 0
        for i, cell in enumerate(row):
            if i == li:
                labels.append(cell.strip())
            else:
                feats[r - 1, j] = _parse_float(cell.strip(), r, header[i])
                j += 1

    if task == "regression":
        y = np.array(
            [[_parse_float(v, r, header[li])] for r, v in enumerate(labels, start=1)]
        )
        raw = None
    elif task == "classification":
        y = np.empty((len(rows), 0))
        raw = tuple(labels)
    else:
        raise DataError(f"unknown task {task!r}")

    return Dataset(
        features=feats,
        response=y,
        feature_names=tuple(feature_names),
        sample_ids=np.arange(len(rows), dtype=np.int64),
        task=task,
        raw_labels=raw,
    )


def save_csv(dataset: Dataset, path, label_name: str = "label") -> None:
    """Write a Dataset back to CSV; reloading reproduces the matrices exactly.

    Floats are written with ``repr`` (shortest round-trip representation).
    """
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(list(dataset.feature_names) + [label_name])
        for i in range(dataset.n_samples):
            row = [repr(float(v)) for v in dataset.features[i]]
            if dataset.task == "regression":
                row.append(repr(float(dataset.response[i, 0])))
            else:
                row.append(dataset.raw_labels[i])
            w.writerow(row)


def subsample(dataset, fraction: float, seed: int) -> SplitPair:
    """Draw a uniform without-replacement in-bag subset of round(fraction*m) rows.

    ``dataset`` may be a Dataset or a plain row count. Deterministic for a
    fixed (m, fraction, seed); in_bag and oob are each returned in ascending
    index order.
    """
    if not 0.0 < fraction <= 1.0:
        raise DataError(f"fraction must be in (0, 1], got {fraction}")
    m = dataset if isinstance(dataset, (int, np.integer)) else dataset.n_samples
    n_in = int(round(fraction * m))
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    perm = rng.permutation(m)
    in_bag = np.sort(perm[:n_in])
    oob = np.sort(perm[n_in:])
    return SplitPair(in_bag=in_bag, oob=oob, seed=seed, fraction=fraction)


def kfold_indices(dataset, k: int, seed: int, stratified: bool = False):
    """Return k (train, test) index pairs partitioning 0..m-1.

    With ``stratified`` (classification only), per-class proportions are
    preserved within one sample per class per fold. A class with fewer than
    k members triggers a warning and a fall back to plain folding.
    """
    m = dataset if isinstance(dataset, (int, np.integer)) else dataset.n_samples
    if not 2 <= k <= m:
        raise DataError(f"k must satisfy 2 <= k <= {m}, got {k}")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))

    if stratified:
        if isinstance(dataset, (int, np.integer)) or dataset.task != "classification":
            raise DataError("stratified folding requires a classification dataset")
        labels = np.asarray(dataset.raw_labels)
        classes, counts = np.unique(labels, return_counts=True)
        if counts.min() < k:
            warnings.warn(
                "a class has fewer than k members; falling back to plain folds",
                stacklevel=2,
            )
        else:
            fold_of = np.empty(m, dtype=np.int64)
            # Round-robin assignment within each shuffled class keeps the
            # per-fold class counts within +-1.
            for c in classes:
                idx = np.flatnonzero(labels == c)
                idx = rng.permutation(idx)
                fold_of[idx] = np.arange(len(idx)) % k
            return _pairs_from_fold_of(fold_of, k)

    perm = rng.permutation(m)
    fold_of = np.empty(m, dtype=np.int64)
    fold_of[perm] = np.arange(m) % k
    return _pairs_from_fold_of(fold_of, k)


def _pairs_from_fold_of(fold_of: np.ndarray, k: int):
    pairs = []
    for f in range(k):
        test = np.flatnonzero(fold_of == f)
        train = np.flatnonzero(fold_of != f)
        pairs.append((train, test))
    return pairs


def save_folds(pairs, path) -> None:
    """Export fold assignments as a (sample_id, fold) CSV for audit."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["sample_id", "fold"])
        for f, (_, test) in enumerate(pairs):
            for i in test:
                w.writerow([int(i), f])


def load_folds(path, m: int):
    """Read a (sample_id, fold) CSV back into (train, test) index pairs."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"no such fold file: {path}")
    fold_of = np.full(m, -1, dtype=np.int64)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["sample_id", "fold"]:
            raise DataError("fold file must have header 'sample_id,fold'")
        for r, row in enumerate(reader, start=1):
            if not row:
                continue
            try:
                i, f = int(row[0]), int(row[1])
            except (ValueError, IndexError):
                raise DataError(f"bad fold row {r}: {row!r}") from None
            if not 0 <= i < m:
                raise DataError(f"sample_id {i} out of range at row {r}")
            if fold_of[i] != -1:
                raise DataError(f"duplicate sample_id {i} at row {r}")
            fold_of[i] = f
    if (fold_of == -1).any():
        missing = int(np.flatnonzero(fold_of == -1)[0])
        raise DataError(f"fold file does not cover sample_id {missing}")
    k = int(fold_of.max()) + 1
    return _pairs_from_fold_of(fold_of, k)
