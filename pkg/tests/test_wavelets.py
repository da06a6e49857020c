import numpy as np
import pytest

from gwboost.errors import DataError
from gwboost.tree import fit_tree, path_node_ids, predict_full
from gwboost.wavelets import (
    export_wavelet_csv,
    mterm_loss_curve,
    predict_mterm,
    predict_mterm_batch,
    sort_wavelets,
)


def hand_tree():
    X = np.array([[1.0], [2.0], [3.0], [4.0]])
    Y = np.array([[0.0], [0.0], [8.0], [10.0]])
    return fit_tree(X, Y, max_depth=2, min_leaf=1), X, Y


def naive_loss_curve(tree, order, X, Y):
    """Oracle: re-predict every row for every M from scratch."""
    out = []
    for M in range(1, tree.n_nodes + 1):
        loss = 0.0
        for i in range(X.shape[0]):
            loss += float(
                ((Y[i] - predict_mterm(tree, order, M, X[i])) ** 2).sum()
            )
        out.append((M, loss))
    return out


def brute_force_norm(tree, node, Y):
    """Oracle: sum the squared per-sample delta between node and parent fits."""
    parent = tree.nodes[node.parent]
    total = 0.0
    for i in node.sample_indices:
        total += float(((node.mean - parent.mean) ** 2).sum())
    return total


class TestNorms:
    def test_hand_derived_norms(self):
        t, _, _ = hand_tree()
        norms = [n.wavelet_norm_sq for n in t.nodes]
        assert np.isinf(norms[0])
        assert norms[1:] == [40.5, 40.5, 1.0, 1.0]

    def test_hand_derived_deltas(self):
        t, _, _ = hand_tree()
        deltas = [float(n.wavelet_delta[0]) for n in t.nodes]
        assert deltas == [4.5, -4.5, 4.5, -1.0, 1.0]

    def test_constant_response_all_zero(self):
        rng = np.random.default_rng(0)
        X = rng.normal(size=(40, 3))
        Y = np.full((40, 2), 3.25)
        t = fit_tree(X, Y, max_depth=6)
        for n in t.nodes[1:]:
            assert n.wavelet_norm_sq == 0.0

    def test_single_sample_leaf_norm(self):
        X = np.array([[0.0], [1.0]])
        Y = np.array([[0.0], [6.0]])
        t = fit_tree(X, Y, max_depth=1)
        # deltas are +-3 on single-sample leaves
        assert t.nodes[1].wavelet_norm_sq == 9.0
        assert t.nodes[2].wavelet_norm_sq == 9.0

    def test_brute_force_norm_oracle(self):
        rng = np.random.default_rng(99)
        for _ in range(10):
            X = rng.normal(size=(int(rng.integers(5, 120)), 4))
            Y = rng.normal(size=(X.shape[0], int(rng.integers(1, 3))))
            t = fit_tree(X, Y, max_depth=5)
            for n in t.nodes[1:]:
                assert n.wavelet_norm_sq == pytest.approx(
                    brute_force_norm(t, n, Y), rel=1e-12, abs=1e-300
                )


class TestSortWavelets:
    def test_hand_derived_order(self):
        t, _, _ = hand_tree()
        o = sort_wavelets(t)
        np.testing.assert_array_equal(o.order, [0, 1, 2, 3, 4])
        assert np.isinf(o.norms[0])
        assert list(o.norms[1:]) == [40.5, 40.5, 1.0, 1.0]

    def test_root_first_and_monotone_tail(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            X = rng.normal(size=(60, 3))
            Y = rng.normal(size=(60, 1))
            t = fit_tree(X, Y, max_depth=5)
            o = sort_wavelets(t)
            assert o.order[0] == 0
            assert sorted(o.order) == list(range(t.n_nodes))
            tail = o.norms[1:]
            assert all(a >= b for a, b in zip(tail, tail[1:]))

    def test_tie_break_by_node_id(self):
        t, _, _ = hand_tree()
        o = sort_wavelets(t)
        # nodes 1 and 2 tie at 40.5; 3 and 4 tie at 1.0
        assert list(o.order) == [0, 1, 2, 3, 4]

    def test_constant_tree_orders_ids_ascending(self):
        X = np.arange(6, dtype=float).reshape(-1, 1)
        Y = np.full((6, 1), 2.0)
        t = fit_tree(X, Y, max_depth=3)
        o = sort_wavelets(t)
        assert list(o.order) == list(range(t.n_nodes))


class TestPredictMterm:
    def test_m1_is_root_mean(self):
        t, X, _ = hand_tree()
        o = sort_wavelets(t)
        for x in X:
            np.testing.assert_allclose(predict_mterm(t, o, 1, x), [4.5])

    def test_m3_partial_path(self):
        t, _, _ = hand_tree()
        o = sort_wavelets(t)
        np.testing.assert_allclose(predict_mterm(t, o, 3, [4.0]), [9.0])

    def test_m_all_equals_full(self):
        t, X, _ = hand_tree()
        o = sort_wavelets(t)
        for x in X:
            np.testing.assert_allclose(
                predict_mterm(t, o, t.n_nodes, x), predict_full(t, x)
            )

    def test_m_out_of_range(self):
        t, _, _ = hand_tree()
        o = sort_wavelets(t)
        with pytest.raises(DataError):
            predict_mterm(t, o, 0, [1.0])
        with pytest.raises(DataError):
            predict_mterm(t, o, 6, [1.0])

    def test_batch_matches_pointwise(self):
        rng = np.random.default_rng(8)
        X = rng.normal(size=(50, 4))
        Y = rng.normal(size=(50, 2))
        t = fit_tree(X, Y, max_depth=4)
        o = sort_wavelets(t)
        Q = rng.normal(size=(30, 4))
        for M in (1, t.n_nodes // 2 or 1, t.n_nodes):
            batch = predict_mterm_batch(t, o, M, Q)
            for i in range(Q.shape[0]):
                np.testing.assert_allclose(batch[i], predict_mterm(t, o, M, Q[i]))

    def test_prefix_consistency(self):
        rng = np.random.default_rng(12)
        X = rng.normal(size=(80, 3))
        Y = rng.normal(size=(80, 1))
        t = fit_tree(X, Y, max_depth=5)
        o = sort_wavelets(t)
        x = rng.normal(size=3)
        on_path = set(path_node_ids(t, x))
        prev = predict_mterm(t, o, 1, x)
        for M in range(2, t.n_nodes + 1):
            cur = predict_mterm(t, o, M, x)
            nid = int(o.order[M - 1])
            if nid in on_path:
                np.testing.assert_allclose(
                    cur - prev, t.nodes[nid].wavelet_delta, atol=1e-12
                )
            else:
                np.testing.assert_array_equal(cur, prev)
            prev = cur


class TestLossCurve:
    def test_hand_derived_losses(self):
        t, X, Y = hand_tree()
        o = sort_wavelets(t)
        curve = dict(mterm_loss_curve(t, o, X, Y))
        assert curve[1] == 83.0
        assert curve[5] == 0.0

    def test_flat_for_constant_tree(self):
        X = np.arange(8, dtype=float).reshape(-1, 1)
        Y = np.full((8, 1), 3.0)
        t = fit_tree(X, Y, max_depth=3)
        o = sort_wavelets(t)
        losses = [l for _, l in mterm_loss_curve(t, o, X, Y)]
        assert all(l == pytest.approx(losses[0]) for l in losses)

    def test_incremental_equals_naive_oracle(self):
        rng = np.random.default_rng(77)
        for _ in range(8):
            X = rng.normal(size=(int(rng.integers(5, 60)), 3))
            Y = rng.normal(size=(X.shape[0], int(rng.integers(1, 3))))
            t = fit_tree(X, Y, max_depth=4)
            o = sort_wavelets(t)
            eval_X = rng.normal(size=(25, 3))
            eval_Y = rng.normal(size=(25, Y.shape[1]))
            fast = mterm_loss_curve(t, o, eval_X, eval_Y)
            slow = naive_loss_curve(t, o, eval_X, eval_Y)
            for (m1, l1), (m2, l2) in zip(fast, slow):
                assert m1 == m2
                assert l1 == pytest.approx(l2, rel=1e-9, abs=1e-9)

    def test_empty_eval_set_rejected(self):
        t, _, _ = hand_tree()
        o = sort_wavelets(t)
        with pytest.raises(DataError):
            mterm_loss_curve(t, o, np.empty((0, 1)), np.empty((0, 1)))


def test_telescoping_on_random_trees():
    rng = np.random.default_rng(314)
    for _ in range(20):
        m = int(rng.integers(5, 300))
        n = int(rng.integers(1, 8))
        X = rng.normal(size=(m, n))
        Y = rng.normal(size=(m, 1))
        t = fit_tree(X, Y, max_depth=int(rng.integers(1, 8)))
        o = sort_wavelets(t)
        Q = rng.normal(size=(50, n))
        full = np.array([predict_full(t, q) for q in Q])
        mall = predict_mterm_batch(t, o, t.n_nodes, Q)
        np.testing.assert_allclose(mall, full, rtol=1e-9, atol=1e-12)


def test_export_csv(tmp_path):
    t, _, _ = hand_tree()
    o = sort_wavelets(t)
    p = tmp_path / "wavelets.csv"
    export_wavelet_csv(t, o, p)
    lines = p.read_text().strip().splitlines()
    assert lines[0] == "node_id,depth,norm_sq"
    assert len(lines) == 6
    assert lines[1].startswith("0,0,inf")
