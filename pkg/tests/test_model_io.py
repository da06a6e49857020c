import json

import numpy as np
import pytest

from gwboost.boosting import BoostConfig, fit_classifier, predict_batch, train
from gwboost.data import Dataset
from gwboost.errors import ModelError
from gwboost.model_io import FORMAT_VERSION, load_model, save_model
from gwboost.tree import predict_full


def regression_dataset(m=60, seed=1):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(m, 4))
    y = X[:, 0] - 0.5 * X[:, 2] ** 2 + rng.normal(scale=0.1, size=m)
    return Dataset(
        features=X,
        response=y[:, None],
        feature_names=("a", "b", "c", "d"),
        sample_ids=np.arange(m),
        task="regression",
    )


def test_round_trip_bit_identical_predictions(tmp_path):
    ds = regression_dataset()
    ens = train(ds, BoostConfig(iterations=5, max_depth=5, seed=3))
    path = tmp_path / "model.json"
    save_model(ens, path)
    back = load_model(path)
    rng = np.random.default_rng(5)
    Q = rng.normal(size=(100, 4))
    np.testing.assert_array_equal(predict_batch(back, Q), predict_batch(ens, Q))


def test_round_trip_classification(tmp_path):
    rng = np.random.default_rng(8)
    X = np.vstack([rng.normal(-1, 1, (15, 2)), rng.normal(1, 1, (15, 2))])
    ds = Dataset(
        features=X,
        response=np.empty((30, 0)),
        feature_names=("a", "b"),
        sample_ids=np.arange(30),
        task="classification",
        raw_labels=("n",) * 15 + ("p",) * 15,
    )
    ens = fit_classifier(
        ds, BoostConfig(iterations=3, max_depth=3, seed=0, task="classification")
    )
    path = tmp_path / "model.json"
    save_model(ens, path)
    back = load_model(path)
    assert back.encoding.label_order == ("n", "p")
    np.testing.assert_array_equal(back.encoding.vertices, ens.encoding.vertices)
    np.testing.assert_array_equal(
        predict_batch(back, X), predict_batch(ens, X)
    )


def test_save_is_byte_deterministic(tmp_path):
    ds = regression_dataset()
    cfg = BoostConfig(iterations=3, max_depth=4, seed=11)
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    save_model(train(ds, cfg), p1)
    save_model(train(ds, cfg), p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_loaded_tree_means_rebuilt(tmp_path):
    ds = regression_dataset()
    ens = train(ds, BoostConfig(iterations=1, max_depth=4, seed=0))
    path = tmp_path / "model.json"
    save_model(ens, path)
    back = load_model(path)
    t0, t1 = ens.stages[0].tree, back.stages[0].tree
    x = ds.features[7]
    np.testing.assert_allclose(predict_full(t1, x), predict_full(t0, x), atol=1e-12)


def test_version_mismatch_rejected(tmp_path):
    ds = regression_dataset()
    ens = train(ds, BoostConfig(iterations=1, max_depth=2, seed=0))
    path = tmp_path / "model.json"
    save_model(ens, path)
    doc = json.loads(path.read_text())
    doc["format_version"] = FORMAT_VERSION + 1
    path.write_text(json.dumps(doc))
    with pytest.raises(ModelError, match="format_version"):
        load_model(path)


def test_missing_and_invalid_files(tmp_path):
    with pytest.raises(ModelError, match="no such model file"):
        load_model(tmp_path / "nope.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ModelError, match="invalid model JSON"):
        load_model(bad)
    notmodel = tmp_path / "nm.json"
    notmodel.write_text("{}")
    with pytest.raises(ModelError, match="not a model file"):
        load_model(notmodel)
