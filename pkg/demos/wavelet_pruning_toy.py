"""Walk through wavelet pruning on a tree small enough to check by hand.

Four points on a line with responses [0, 0, 8, 10]. The tree first splits the
two near-zero points from the two large ones, then splits 8 from 10. Each
node below the root carries a delta (its mean minus its parent's mean) whose
squared norm, weighted by the node's sample count, says how much the node
contributes. Keeping only the M largest-norm nodes gives a pruned predictor.
"""

import numpy as np

from gwboost.tree import fit_tree
from gwboost.wavelets import mterm_loss_curve, predict_mterm, sort_wavelets

X = np.array([[1.0], [2.0], [3.0], [4.0]])
Y = np.array([[0.0], [0.0], [8.0], [10.0]])

tree = fit_tree(X, Y, max_depth=2)
order = sort_wavelets(tree)

print("node  depth  mean   delta  norm^2")
for node in tree.nodes:
    norm = "inf" if np.isinf(node.wavelet_norm_sq) else f"{node.wavelet_norm_sq:g}"
    print(
        f"{node.node_id:>4}  {node.depth:>5}  {float(node.mean[0]):>5g}"
        f"  {float(node.wavelet_delta[0]):>5g}  {norm:>6}"
    )

print("\nimportance order:", [int(i) for i in order.order])

for M in range(1, tree.n_nodes + 1):
    preds = [float(predict_mterm(tree, order, M, x)[0]) for x in X]
    print(f"M={M}: predictions {preds}")

print("\ntraining loss as wavelets are added:")
for M, loss in mterm_loss_curve(tree, order, X, Y):
    print(f"  M={M}  sum of squared errors {loss:g}")
