"""Regular-simplex label encoding.

P class labels are mapped to the P vertices of a regular simplex in
R^(P-1): unit-norm points with pairwise inner products -1/(P-1), centered
at the origin. Classification thereby becomes vector-valued regression,
and a predicted point decodes back to the label of its nearest vertex.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError

__all__ = ["SimplexEncoding", "build_encoding", "encode", "decode"]


@dataclass(frozen=True)
class SimplexEncoding:
    class_count: int
    vertices: np.ndarray  # (P, P-1), row i is the vertex of label_order[i]
    label_order: tuple  # P labels, sorted lexicographically


def build_encoding(labels) -> SimplexEncoding:
    """Build the canonical encoding for the distinct labels in ``labels``.

    The construction is deterministic: vertices are the centered standard
    basis of R^P expressed in the Helmert orthonormal basis of the
    hyperplane orthogonal to (1,...,1), rescaled to unit norm. For P=2 this
    reduces to +1 for the first sorted label and -1 for the second.
    """
    order = tuple(sorted(set(str(l) for l in labels)))
    P = len(order)
    if P < 2:
        raise DataError(f"need at least 2 distinct labels, got {P}")

    # Helmert rows h_k, k=1..P-1: (1,...,1,-k,0,...,0)/sqrt(k(k+1)), an
    # orthonormal basis of the complement of the all-ones direction.
    H = np.zeros((P - 1, P))
    for k in range(1, P):
        H[k - 1, :k] = 1.0
        H[k - 1, k] = -k
        H[k - 1] /= np.sqrt(k * (k + 1.0))
    # Vertex i = sqrt(P/(P-1)) * H e_i; the centered basis vector e_i - 1/P
    # has the same Helmert coordinates and squared norm (P-1)/P.
    V = np.sqrt(P / (P - 1.0)) * H.T
    V.setflags(write=False)
    return SimplexEncoding(class_count=P, vertices=V, label_order=order)


def encode(label, enc: SimplexEncoding) -> np.ndarray:
    """Return the vertex assigned to ``label``."""
    label = str(label)
    if label not in enc.label_order:
        raise DataError(f"unknown label {label!r}")
    return enc.vertices[enc.label_order.index(label)]


def encode_many(labels, enc: SimplexEncoding) -> np.ndarray:
    """Encode a sequence of labels into an (m, P-1) response matrix."""
    lut = {l: i for i, l in enumerate(enc.label_order)}
    try:
        rows = [lut[str(l)] for l in labels]
    except KeyError as e:
        raise DataError(f"unknown label {e.args[0]!r}") from None
    return enc.vertices[rows]


def decode(point, enc: SimplexEncoding):
    """Map a point in R^(P-1) back to (label, confidence, score_vector).

    The label is the nearest vertex (equivalently the largest inner
    product, since all vertices share a norm); ties go to the
    lexicographically first label. ``score_vector`` holds the inner
    products with every vertex and ``confidence`` is their softmax at the
    chosen label.
    """
    p = np.asarray(point, dtype=np.float64).reshape(-1)
    if p.shape[0] != enc.class_count - 1:
        raise DataError(
            f"point dimension {p.shape[0]} != {enc.class_count - 1}"
        )
    if not np.isfinite(p).all():
        raise DataError("non-finite coordinate in point")
    scores = enc.vertices @ p
    best = int(np.argmax(scores))  # first occurrence = lexicographic tie-break
    z = scores - scores.max()
    softmax = np.exp(z)
    softmax /= softmax.sum()
    return enc.label_order[best], float(softmax[best]), scores


def binary_score(point, enc: SimplexEncoding, positive_label) -> float:
    """Scalar ranking score for P=2: the point's single coordinate, oriented
    so larger means more like ``positive_label``."""
    if enc.class_count != 2:
        raise DataError("binary_score requires a 2-class encoding")
    p = np.asarray(point, dtype=np.float64).reshape(-1)
    sign = encode(positive_label, enc)[0]  # +1 or -1
    return float(sign * p[0])
