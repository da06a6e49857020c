import numpy as np
import pytest

from gwboost.boosting import (
    BoostConfig,
    fit_classifier,
    init_constant,
    predict,
    predict_batch,
    predict_labels,
    select_m,
    train,
    truncate,
)
from gwboost.data import Dataset
from gwboost.errors import DataError
from gwboost.tree import fit_tree
from gwboost.wavelets import sort_wavelets


def make_regression(m=30, n=3, seed=0):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(m, n))
    y = X[:, 0] * 2.0 + np.sin(X[:, 1]) + rng.normal(scale=0.1, size=m)
    return Dataset(
        features=X,
        response=y[:, None],
        feature_names=tuple(f"f{i}" for i in range(n)),
        sample_ids=np.arange(m),
        task="regression",
    )


class TestInitConstant:
    def test_scalar_mean(self):
        np.testing.assert_allclose(init_constant(np.array([1.0, 2.0, 3.0])), [2.0])

    def test_encoded_binary_mean(self):
        Y = np.array([[1.0], [1.0], [1.0], [-1.0]])
        np.testing.assert_allclose(init_constant(Y), [0.5])

    def test_column_means(self):
        Y = np.array([[1.0, 0.0], [0.0, 1.0]])
        np.testing.assert_allclose(init_constant(Y), [0.5, 0.5])

    def test_empty_rejected(self):
        with pytest.raises(DataError):
            init_constant(np.empty((0, 1)))


class TestConfig:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"iterations": 0},
            {"nu": 0.0},
            {"nu": 1.5},
            {"max_depth": -1},
            {"subsample_fraction": 0.0},
            {"min_leaf": 0},
            {"task": "ranking"},
        ],
    )
    def test_invalid_config(self, kwargs):
        with pytest.raises(DataError):
            BoostConfig(**kwargs)


class TestSelectM:
    def _tree(self):
        X = np.array([[1.0], [2.0], [3.0], [4.0]])
        Y = np.array([[0.0], [0.0], [8.0], [10.0]])
        t = fit_tree(X, Y, 2)
        return t, sort_wavelets(t), X, Y

    def test_argmin_on_training_data(self):
        t, o, X, Y = self._tree()
        # full curve is [83, 42.5, 2, 1, 0] -> M=5
        assert select_m(o, t, X, Y) == 5

    def test_tie_takes_smallest_m(self):
        X = np.arange(4, dtype=float).reshape(-1, 1)
        Y = np.full((4, 1), 5.0)
        t = fit_tree(X, Y, 2)
        o = sort_wavelets(t)
        assert select_m(o, t, X, Y) == 1  # flat curve


class TestTrain:
    def test_single_full_stage_interpolates(self):
        ds = make_regression(m=16)
        cfg = BoostConfig(
            iterations=1, nu=1.0, max_depth=10, subsample_fraction=1.0, seed=1
        )
        ens = train(ds, cfg)
        pred = predict_batch(ens, ds.features)
        np.testing.assert_allclose(pred, ds.response, atol=1e-9)

    def test_shrinkage_residual_fraction(self):
        ds = make_regression(m=16)
        cfg = BoostConfig(
            iterations=1, nu=0.1, max_depth=10, subsample_fraction=1.0, seed=1
        )
        ens = train(ds, cfg)
        pred = predict_batch(ens, ds.features)
        ybar = ds.response.mean(axis=0)
        expected = ybar + 0.1 * (ds.response - ybar)
        np.testing.assert_allclose(pred, expected, atol=1e-9)

    def test_constant_response_stays_constant(self):
        X = np.random.default_rng(2).normal(size=(20, 2))
        ds = Dataset(
            features=X,
            response=np.full((20, 1), 4.0),
            feature_names=("a", "b"),
            sample_ids=np.arange(20),
            task="regression",
        )
        ens = train(ds, BoostConfig(iterations=5, seed=0))
        pred = predict_batch(ens, X)
        np.testing.assert_allclose(pred, 4.0, atol=1e-12)
        for s in ens.stages:
            assert s.tree.n_nodes == 1

    def test_full_fraction_keeps_all_wavelets(self):
        ds = make_regression()
        cfg = BoostConfig(iterations=3, subsample_fraction=1.0, max_depth=3, seed=5)
        ens = train(ds, cfg)
        for s in ens.stages:
            assert s.m_terms == s.tree.n_nodes

    def test_training_loss_nonincreasing_without_subsampling(self):
        ds = make_regression(m=60)
        losses = []
        for K in range(1, 6):
            cfg = BoostConfig(
                iterations=K, nu=0.5, max_depth=4, subsample_fraction=1.0, seed=3
            )
            ens = train(ds, cfg)
            res = ds.response - predict_batch(ens, ds.features)
            losses.append(float((res ** 2).sum()))
        assert all(a >= b - 1e-9 for a, b in zip(losses, losses[1:]))

    def test_determinism(self):
        from gwboost.model_io import model_to_dict
        import json

        ds = make_regression(m=50)
        cfg = BoostConfig(iterations=4, max_depth=4, seed=9)
        a = json.dumps(model_to_dict(train(ds, cfg)))
        b = json.dumps(model_to_dict(train(ds, cfg)))
        assert a == b

    def test_unencoded_classification_rejected(self):
        ds = Dataset(
            features=np.zeros((4, 1)),
            response=np.empty((4, 0)),
            feature_names=("x",),
            sample_ids=np.arange(4),
            task="classification",
            raw_labels=("a", "a", "b", "b"),
        )
        with pytest.raises(DataError, match="encoded"):
            train(ds, BoostConfig(task="classification"))

    def test_stage_count_and_shrinkage_linearity(self):
        ds = make_regression()
        cfg = BoostConfig(iterations=1, nu=0.3, max_depth=3, seed=4)
        ens = train(ds, cfg)
        assert len(ens.stages) == 1
        from gwboost.wavelets import predict_mterm_batch

        s = ens.stages[0]
        contrib = predict_mterm_batch(s.tree, s.order, s.m_terms, ds.features)
        pred = predict_batch(ens, ds.features)
        np.testing.assert_allclose(pred - ens.f0, 0.3 * contrib, atol=1e-12)

    def test_truncate_prefix(self):
        ds = make_regression()
        ens = train(ds, BoostConfig(iterations=5, max_depth=3, seed=2))
        t0 = truncate(ens, 0)
        np.testing.assert_array_equal(
            predict_batch(t0, ds.features), np.tile(ens.f0, (ds.n_samples, 1))
        )
        t5 = truncate(ens, 5)
        np.testing.assert_array_equal(
            predict_batch(t5, ds.features), predict_batch(ens, ds.features)
        )
        with pytest.raises(DataError):
            truncate(ens, 6)


class TestClassification:
    def _dataset(self):
        rng = np.random.default_rng(31)
        X = np.vstack([rng.normal(-1, 0.5, (20, 2)), rng.normal(1, 0.5, (20, 2))])
        labels = ("neg",) * 20 + ("pos",) * 20
        return Dataset(
            features=X,
            response=np.empty((40, 0)),
            feature_names=("a", "b"),
            sample_ids=np.arange(40),
            task="classification",
            raw_labels=labels,
        )

    def test_fit_classifier_separable(self):
        ds = self._dataset()
        ens = fit_classifier(
            ds, BoostConfig(iterations=20, max_depth=3, seed=0, task="classification")
        )
        results = predict_labels(ens, ds.features)
        pred = [r[0] for r in results]
        assert pred == list(ds.raw_labels)
        for _, conf, score in results:
            assert 0.0 <= conf <= 1.0
            assert score is not None

    def test_predict_labels_requires_encoding(self):
        ds = make_regression()
        ens = train(ds, BoostConfig(iterations=1, max_depth=2, seed=0))
        with pytest.raises(DataError):
            predict_labels(ens, ds.features)

    def test_predict_dimension_mismatch(self):
        ds = make_regression()
        ens = train(ds, BoostConfig(iterations=1, max_depth=2, seed=0))
        with pytest.raises(DataError):
            predict(ens, [1.0])
