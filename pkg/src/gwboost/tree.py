"""Binary CART regression trees on vector-valued responses.

Splits are axis-aligned thresholds chosen by exhaustive scan to minimize
the summed squared error of the two children's constant (mean) fits.
Every node also carries its wavelet delta (mean minus parent mean) and the
discrete wavelet norm, filled in as the final construction step.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .errors import DataError

__all__ = ["TreeNode", "WaveletTree", "best_split", "fit_tree", "predict_full"]

# A candidate split must beat the parent SSE by more than this to be kept.
SPLIT_IMPROVEMENT_TOL = 1e-12


@dataclass
class TreeNode:
    node_id: int
    depth: int
    sample_indices: np.ndarray  # row positions into the training arrays
    mean: np.ndarray  # (d,) constant fit over the node's samples
    split: Optional[Tuple[int, float]] = None  # (feature_index, threshold)
    left: Optional[int] = None
    right: Optional[int] = None
    parent: Optional[int] = None
    wavelet_delta: Optional[np.ndarray] = None  # mean - parent mean; root: mean
    wavelet_norm_sq: float = 0.0

    @property
    def is_leaf(self) -> bool:
        return self.split is None

    @property
    def n_samples(self) -> int:
        return len(self.sample_indices)


@dataclass
class WaveletTree:
    nodes: List[TreeNode]
    max_depth: int
    response_dim: int
    n_features: int

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def root(self) -> TreeNode:
        return self.nodes[0]


def _node_sse(Y: np.ndarray) -> float:
    c = Y.mean(axis=0)
    return float(((Y - c) ** 2).sum())


def best_split(X: np.ndarray, Y: np.ndarray, min_leaf: int = 1):
    """Exhaustively scan all features for the SSE-minimizing axis split.

    Candidate thresholds are midpoints between consecutive distinct sorted
    values of each feature; both sides must keep at least ``min_leaf``
    samples. Ties break toward the lower feature index, then the lower
    threshold. Returns (feature_index, threshold, sse_after) or None when
    nothing beats the parent SSE by more than SPLIT_IMPROVEMENT_TOL.
    """
    m, n = X.shape
    if m < 2 or m < 2 * min_leaf:
        return None

    order = np.argsort(X, axis=0, kind="stable")  # (m, n)
    Xs = np.take_along_axis(X, order, axis=0)
    Ys = Y[order]  # (m, n, d)

    csum = np.cumsum(Ys, axis=0)  # (m, n, d)
    csq = np.cumsum((Ys * Ys).sum(axis=2), axis=0)  # (m, n)
    total_sum = csum[-1, 0]  # (d,) same for every feature column
    total_sq = csq[-1, 0]

    cnt_left = np.arange(1, m, dtype=np.float64)[:, None]  # (m-1, 1)
    cnt_right = m - cnt_left
    left_sum = csum[:-1]  # (m-1, n, d)
    left_sq = csq[:-1]  # (m-1, n)
    sse = (
        left_sq
        - (left_sum * left_sum).sum(axis=2) / cnt_left
        + (total_sq - left_sq)
        - ((total_sum - left_sum) ** 2).sum(axis=2) / cnt_right
    )

    valid = (
        (Xs[1:] > Xs[:-1])
        & (cnt_left >= min_leaf)
        & (cnt_right >= min_leaf)
    )
    if not valid.any():
        return None
    sse = np.where(valid, sse, np.inf)

    # argmin scanned per feature (first hit = lowest threshold), then across
    # features (first hit = lowest feature index).
    pos = np.argmin(sse, axis=0)  # (n,)
    vals = sse[pos, np.arange(n)]
    f = int(np.argmin(vals))
    p = int(pos[f])
    sse_after = float(vals[f])

    parent_sse = float(total_sq - (total_sum @ total_sum) / m)
    if parent_sse - sse_after <= SPLIT_IMPROVEMENT_TOL:
        return None
    threshold = 0.5 * (Xs[p, f] + Xs[p + 1, f])
    return f, float(threshold), sse_after


def fit_tree(
    X: np.ndarray,
    Y: np.ndarray,
    max_depth: int,
    min_leaf: int = 1,
) -> WaveletTree:
    """Grow a tree by recursive splitting down to ``max_depth`` (root = 0).

    A node becomes a leaf when it reaches max_depth, holds fewer than
    2*min_leaf samples, or no split improves the SSE. Node ids follow
    depth-first creation order, left child before right. Wavelet deltas and
    norms are populated before returning.
    """
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    if Y.ndim == 1:
        Y = Y[:, None]
    if X.ndim != 2 or X.shape[0] != Y.shape[0] or X.shape[0] < 1:
        raise DataError("X and Y must be non-empty with equal row counts")
    if max_depth < 0:
        raise DataError("max_depth must be >= 0")

    nodes: List[TreeNode] = []

    def grow(idx: np.ndarray, depth: int, parent: Optional[int]) -> int:
        nid = len(nodes)
        node = TreeNode(
            node_id=nid,
            depth=depth,
            sample_indices=idx,
            mean=Y[idx].mean(axis=0),
            parent=parent,
        )
        nodes.append(node)
        if depth < max_depth and len(idx) >= 2 * min_leaf:
            found = best_split(X[idx], Y[idx], min_leaf)
            if found is not None:
                f, thr, _ = found
                go_left = X[idx, f] <= thr
                node.split = (f, thr)
                node.left = grow(idx[go_left], depth + 1, nid)
                node.right = grow(idx[~go_left], depth + 1, nid)
        return nid

    grow(np.arange(X.shape[0]), 0, None)
    tree = WaveletTree(
        nodes=nodes,
        max_depth=max_depth,
        response_dim=Y.shape[1],
        n_features=X.shape[1],
    )
    from .wavelets import compute_norms  # final construction step

    compute_norms(tree)
    return tree


def predict_full(tree: WaveletTree, x) -> np.ndarray:
    """Route ``x`` to its leaf (<= goes left) and return the leaf mean."""
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.shape[0] != tree.n_features:
        raise DataError(
            f"feature dimension {x.shape[0]} != {tree.n_features}"
        )
    node = tree.root
    while not node.is_leaf:
        f, thr = node.split
        node = tree.nodes[node.left if x[f] <= thr else node.right]
    return node.mean


def path_node_ids(tree: WaveletTree, x) -> List[int]:
    """The root-to-leaf node ids visited when routing ``x``."""
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    node = tree.root
    ids = [0]
    while not node.is_leaf:
        f, thr = node.split
        node = tree.nodes[node.left if x[f] <= thr else node.right]
        ids.append(node.node_id)
    return ids


def node_memberships(tree: WaveletTree, X: np.ndarray) -> List[np.ndarray]:
    """Per-node arrays of row indices of ``X`` routed through each node."""
    X = np.asarray(X, dtype=np.float64)
    member: List[Optional[np.ndarray]] = [None] * tree.n_nodes
    member[0] = np.arange(X.shape[0])
    for node in tree.nodes:
        if node.is_leaf:
            continue
        rows = member[node.node_id]
        f, thr = node.split
        go_left = X[rows, f] <= thr
        member[node.left] = rows[go_left]
        member[node.right] = rows[~go_left]
    return member
