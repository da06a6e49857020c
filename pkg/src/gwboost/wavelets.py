"""Geometric-wavelet decomposition of fitted trees.

Each non-root node's wavelet is the constant difference between its mean
and its parent's mean, supported on the node's domain; its discrete norm
is ||delta||^2 times the node's sample count. Sorting nodes by descending
norm yields the adaptive M-term approximation: summing the deltas of the
top-M nodes that lie on a query point's root-to-leaf path.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .tree import WaveletTree, node_memberships, path_node_ids

__all__ = [
    "WaveletOrder",
    "compute_norms",
    "sort_wavelets",
    "predict_mterm",
    "predict_mterm_batch",
    "mterm_loss_curve",
    "export_wavelet_csv",
]


@dataclass(frozen=True)
class WaveletOrder:
    """Node ids sorted by descending wavelet norm, root forced first."""

    order: np.ndarray  # permutation of all node_ids, order[0] == 0
    norms: np.ndarray  # aligned wavelet_norm_sq values (root: +inf)


def compute_norms(tree: WaveletTree) -> WaveletTree:
    """Populate wavelet deltas and squared norms on every node in place.

    Non-root: delta = mean - parent mean, norm^2 = ||delta||^2 * #samples.
    The root's delta is its mean and its norm is the +inf sentinel so it
    always ranks first.
    """
    for node in tree.nodes:
        if node.parent is None:
            node.wavelet_delta = node.mean.copy()
            node.wavelet_norm_sq = np.inf
        else:
            delta = node.mean - tree.nodes[node.parent].mean
            node.wavelet_delta = delta
            node.wavelet_norm_sq = float((delta @ delta) * node.n_samples)
    return tree


def sort_wavelets(tree: WaveletTree) -> WaveletOrder:
    """Order node ids by descending norm; ties break by ascending node_id."""
    tail = sorted(
        (n.node_id for n in tree.nodes[1:]),
        key=lambda i: (-tree.nodes[i].wavelet_norm_sq, i),
    )
    order = np.array([0] + tail, dtype=np.int64)
    norms = np.array([tree.nodes[i].wavelet_norm_sq for i in order])
    return WaveletOrder(order=order, norms=norms)


def _check_m(tree: WaveletTree, M: int) -> None:
    if not 1 <= M <= tree.n_nodes:
        raise DataError(f"M must be in [1, {tree.n_nodes}], got {M}")


def predict_mterm(tree: WaveletTree, order: WaveletOrder, M: int, x) -> np.ndarray:
    """Evaluate the M-term approximation at one point.

    Sums the wavelet deltas of the top-M nodes that lie on the point's
    root-to-leaf routing path; the selected set need not form a connected
    subtree.
    """
    _check_m(tree, M)
    selected = set(int(i) for i in order.order[:M])
    out = np.zeros(tree.response_dim)
    for nid in path_node_ids(tree, x):
        if nid in selected:
            out += tree.nodes[nid].wavelet_delta
    return out


def predict_mterm_batch(
    tree: WaveletTree, order: WaveletOrder, M: int, X: np.ndarray
) -> np.ndarray:
    """Vectorized M-term evaluation over the rows of ``X``."""
    _check_m(tree, M)
    X = np.asarray(X, dtype=np.float64)
    member = node_memberships(tree, X)
    out = np.zeros((X.shape[0], tree.response_dim))
    for nid in order.order[:M]:
        rows = member[nid]
        if len(rows):
            out[rows] += tree.nodes[nid].wavelet_delta
    return out


def mterm_loss_curve(tree: WaveletTree, order: WaveletOrder, eval_X, eval_Y):
    """Squared-error loss of the M-term approximation for M = 1..n_nodes.

    Returns a list of (M, loss) pairs where loss is the total squared error
    over the evaluation rows. Computed incrementally: adding the next
    wavelet only touches the rows routed through its node.
    """
    X = np.asarray(eval_X, dtype=np.float64)
    Y = np.asarray(eval_Y, dtype=np.float64)
    if Y.ndim == 1:
        Y = Y[:, None]
    if X.shape[0] == 0:
        raise DataError("empty evaluation set")
    member = node_memberships(tree, X)
    pred = np.zeros((X.shape[0], tree.response_dim))
    loss = float((Y * Y).sum())  # M=0 state: prediction identically zero
    curve = []
    for M, nid in enumerate(order.order, start=1):
        rows = member[nid]
        if len(rows):
            delta = tree.nodes[nid].wavelet_delta
            old = pred[rows]
            new = old + delta
            loss += float(((Y[rows] - new) ** 2).sum() - ((Y[rows] - old) ** 2).sum())
            pred[rows] = new
        curve.append((int(M), loss))
    return curve


def export_wavelet_csv(tree: WaveletTree, order: WaveletOrder, path) -> None:
    """Dump (node_id, depth, norm) in wavelet order for diagnostics."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["node_id", "depth", "norm_sq"])
        for nid, norm in zip(order.order, order.norms):
            w.writerow([int(nid), tree.nodes[nid].depth, repr(float(norm))])
