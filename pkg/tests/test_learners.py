"""The eight classifiers: degenerate cases, cross-checks between related
learners, encoding, and model round-trips."""

import numpy as np
import pytest

from metacash.learners.adaboost import AdaBoost
from metacash.learners.cart import DecisionTree
from metacash.learners.encoding import (FeatureEncoder, MissingValueError,
                                        Standardizer)
from metacash.learners.forest import Forest
from metacash.learners.linear import LogisticRegression
from metacash.learners.model import (fit_pipeline, load_model, save_model)
from metacash.learners.spaces import ALGORITHMS, ConfigError, hp_space
from conftest import add_categorical, blob_problem, numeric_dataset


def separable_problem(n=100, seed=0):
    rng = np.random.default_rng(seed)
    y = (np.arange(n) % 2).astype(np.int64)
    X = rng.normal(size=(n, 3))
    X[:, 0] += np.where(y == 1, 4.0, -4.0)
    return X, y


def sample_config(algorithm, seed=0):
    return hp_space(algorithm).sample(np.random.default_rng(seed))


# -- spec'd degenerate and cross-check cases ------------------------------


def test_dt_forced_single_leaf_is_majority():
    X, y = blob_problem(n=40, c=2, seed=1)
    y[:25] = 0
    y[25:] = 1
    tree = DecisionTree(min_samples_split=41).fit(X, y, n_classes=2)
    assert tree.tree.n_nodes == 1
    assert np.all(tree.predict(X) == 0)


def test_forest_of_one_equals_plain_tree():
    X, y = blob_problem(n=80, c=3, seed=2)
    forest = Forest(n_trees=1, bootstrap=False, max_features=0.6,
                    min_samples_leaf=2, seed=9).fit(X, y, n_classes=3)
    tree = DecisionTree(max_features=0.6, min_samples_leaf=2, seed=9).fit(
        X, y, n_classes=3)
    assert np.array_equal(forest.predict(X), tree.predict(X))


def test_logreg_extreme_regularization_shrinks_weights():
    X, y = separable_problem(seed=3)
    X = Standardizer().fit(X).transform(X)
    model = LogisticRegression(C=1e-10, penalty="l2").fit(X, y, n_classes=2)
    assert np.linalg.norm(model.coef) < 1e-3


def test_adaboost_single_round_equals_stump():
    X, y = separable_problem(seed=4)
    boost = AdaBoost(n_estimators=1, learning_rate=1.0, max_depth=1,
                     algorithm="SAMME", seed=5).fit(X, y, n_classes=2)
    stump = DecisionTree(max_depth=1, seed=5).fit(X, y, n_classes=2)
    assert np.array_equal(boost.predict(X), stump.predict(X))


def test_unconstrained_dt_memorizes():
    X, y = blob_problem(n=60, c=3, seed=5)
    tree = DecisionTree().fit(X, y, n_classes=3)
    assert np.mean(tree.predict(X) == y) == 1.0


def test_label_permutation_equivariance():
    X, y = blob_problem(n=90, c=3, seed=6)
    perm = np.array([2, 0, 1])
    tree_a = DecisionTree(seed=3).fit(X, y, n_classes=3)
    tree_b = DecisionTree(seed=3).fit(X, perm[y], n_classes=3)
    assert np.array_equal(perm[tree_a.predict(X)], tree_b.predict(X))


# -- every algorithm fits and beats chance on easy data -------------------


@pytest.mark.parametrize("algorithm", ALGORITHMS)
def test_fit_predict_deterministic(algorithm):
    X, y = separable_problem(n=60, seed=7)
    ds = numeric_dataset(X, y)
    cfg = sample_config(algorithm, seed=11)
    if "n_estimators" in cfg:
        cfg["n_estimators"] = 50
    m1 = fit_pipeline(algorithm, cfg, ds, seed=2)
    m2 = fit_pipeline(algorithm, cfg, ds, seed=2)
    assert np.array_equal(m1.predict(ds), m2.predict(ds))
    labels = m1.predict(ds)
    assert labels.min() >= 0 and labels.max() < 2


def test_invalid_config_rejected():
    X, y = separable_problem(n=30, seed=8)
    ds = numeric_dataset(X, y)
    with pytest.raises(ConfigError):
        fit_pipeline("DECISION_TREE", {"max_features": 5.0}, ds)


def test_degenerate_training_data_rejected():
    X, y = separable_problem(n=30, seed=9)
    y[:] = 0
    ds = numeric_dataset(X, y, class_names=("only",))
    cfg = sample_config("DECISION_TREE")
    with pytest.raises(ValueError):
        fit_pipeline("DECISION_TREE", cfg, ds)


# -- encoding --------------------------------------------------------------


def test_encoder_one_hot_layout():
    X, y = blob_problem(n=12, c=2, seed=10)
    ds = numeric_dataset(X[:, :2], y)
    add_categorical(ds, "color", [0, 1, 2, 0, 1, 2, 0, 1, 2, 0, 1, 2],
                    ("blue", "green", "red"))
    enc = FeatureEncoder().fit(ds)
    M = enc.transform(ds)
    assert M.shape == (12, 2 + 3)
    np.testing.assert_array_equal(M[0, 2:], [1, 0, 0])
    np.testing.assert_array_equal(M[1, 2:], [0, 1, 0])
    np.testing.assert_array_equal(M[2, 2:], [0, 0, 1])


def test_encoder_missing_without_imputer_raises():
    X, y = blob_problem(n=10, c=2, seed=11)
    X[3, 1] = np.nan
    ds = numeric_dataset(X, y)
    with pytest.raises(MissingValueError):
        FeatureEncoder().fit(ds).transform(ds)


@pytest.mark.parametrize("mode,expected", [
    ("mean", 2.0), ("median", 1.0), ("mode", 1.0)])
def test_encoder_imputation_modes(mode, expected):
    col = np.array([1.0, 1.0, np.nan, 4.0])
    ds = numeric_dataset(col[:, None], np.array([0, 1, 0, 1]))
    enc = FeatureEncoder(imputation=mode).fit(ds)
    assert enc.transform(ds)[2, 0] == pytest.approx(expected)


def test_encoder_imputation_state_from_train_only():
    train = numeric_dataset(np.array([[0.0], [2.0]]), np.array([0, 1]))
    test = numeric_dataset(np.array([[np.nan], [100.0]]), np.array([0, 1]))
    enc = FeatureEncoder(imputation="mean").fit(train)
    assert enc.transform(test)[0, 0] == pytest.approx(1.0)


def test_standardizer_zero_variance_column():
    X = np.column_stack([np.ones(5), np.arange(5.0)])
    S = Standardizer().fit(X)
    out = S.transform(X)
    np.testing.assert_allclose(out[:, 0], 0.0)
    assert out[:, 1].std() == pytest.approx(1.0)


# -- serialization ---------------------------------------------------------


@pytest.mark.parametrize("algorithm", ALGORITHMS)
def test_model_round_trip(tmp_path, algorithm):
    X, y = separable_problem(n=50, seed=13)
    ds = numeric_dataset(X, y)
    cfg = sample_config(algorithm, seed=17)
    if "n_estimators" in cfg:
        cfg["n_estimators"] = 50
    model = fit_pipeline(algorithm, cfg, ds, seed=1)
    path = tmp_path / "model.json"
    save_model(model, str(path))
    back = load_model(str(path))
    assert np.array_equal(model.predict(ds), back.predict(ds))
    assert back.algorithm == algorithm
    assert back.classes == ds.classes
