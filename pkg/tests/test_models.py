"""Classifier tests: boosted trees, logistic regression, serialization."""

from __future__ import annotations

import numpy as np
import pytest

from penmetrics import (
    DimensionMismatch,
    SingleClassInput,
    TrainConfig,
    logreg_nll_grad,
    model_from_dict,
    model_to_dict,
    predict_proba,
    predict_raw,
    train_gbdt,
    train_logreg,
)
from penmetrics.models import GbdtModel, log_loss_from_raw, _tree_predict


def _random_problem(seed=0, n=40, d=14):
    rng = np.random.default_rng(seed)
    X = rng.uniform(0, 1, (n, d))
    y = (X[:, 0] + 0.5 * X[:, 1] + 0.2 * rng.standard_normal(n) > 0.75)
    y = y.astype(float)
    if y.min() == y.max():  # force both classes
        y[0], y[-1] = 0.0, 1.0
    return X, y


# --- GBDT --------------------------------------------------------------

def test_gbdt_learns_xor_with_depth_two():
    X = np.tile(np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]]), (5, 1))
    y = np.tile(np.array([0.0, 1.0, 1.0, 0.0]), 5)
    model = train_gbdt(X, y, TrainConfig(max_rounds=50, depth=2))
    pred = (predict_proba(model, X) >= 0.5).astype(float)
    assert np.array_equal(pred, y)
    assert len(model.trees) <= 50


def test_gbdt_training_loss_monotone_non_increasing():
    X, y = _random_problem(seed=1)
    cfg = TrainConfig(max_rounds=80, learning_rate=0.1)
    model = train_gbdt(X, y, cfg)
    raw = np.full(len(y), model.base_score)
    prev = log_loss_from_raw(y, raw)
    for tree in model.trees:
        raw = raw + model.learning_rate * _tree_predict(tree, X)
        cur = log_loss_from_raw(y, raw)
        assert cur <= prev + 1e-12
        prev = cur


def test_gbdt_validation_equal_to_training_never_stops_early():
    X, y = _random_problem(seed=2)
    cfg = TrainConfig(max_rounds=30)
    model = train_gbdt(X, y, cfg, X_val=X, y_val=y)
    assert len(model.trees) == 30
    assert model.best_iteration == 30


def test_gbdt_early_stop_on_noise_validation():
    rng = np.random.default_rng(3)
    X, y = _random_problem(seed=3, n=60)
    X_val = rng.uniform(0, 1, (30, X.shape[1]))
    y_val = rng.integers(0, 2, 30).astype(float)
    cfg = TrainConfig(max_rounds=500, early_stopping_rounds=10)
    model = train_gbdt(X, y, cfg, X_val=X_val, y_val=y_val)
    assert len(model.trees) < 500
    assert 1 <= model.best_iteration <= len(model.trees)


def test_gbdt_truncation_matches_early_stopped_model():
    rng = np.random.default_rng(4)
    X, y = _random_problem(seed=4, n=60)
    X_val, y_val = X[:15] + 0.05 * rng.standard_normal((15, X.shape[1])), y[:15]
    model = train_gbdt(X, y, TrainConfig(max_rounds=120), X_val=X_val, y_val=y_val)
    truncated = GbdtModel(trees=model.trees[:model.best_iteration],
                          learning_rate=model.learning_rate,
                          base_score=model.base_score,
                          best_iteration=model.best_iteration,
                          n_features=model.n_features)
    Xq = rng.uniform(0, 1, (25, X.shape[1]))
    assert np.allclose(predict_raw(model, Xq), predict_raw(truncated, Xq),
                       rtol=0, atol=1e-15)


def test_gbdt_zero_trees_predicts_base_score():
    X, y = _random_problem(seed=5)
    model = train_gbdt(X, y, TrainConfig(max_rounds=25))
    empty = GbdtModel(trees=[], learning_rate=0.1,
                      base_score=model.base_score, best_iteration=0,
                      n_features=X.shape[1])
    want = 1.0 / (1.0 + np.exp(-model.base_score))
    assert np.allclose(predict_proba(empty, X), want, rtol=0, atol=1e-15)


def test_gbdt_deterministic():
    X, y = _random_problem(seed=6)
    cfg = TrainConfig(max_rounds=40)
    d1 = model_to_dict(train_gbdt(X, y, cfg, X_val=X[:10], y_val=y[:10]))
    d2 = model_to_dict(train_gbdt(X, y, cfg, X_val=X[:10], y_val=y[:10]))
    assert d1 == d2


def test_gbdt_single_class_rejected():
    X = np.random.default_rng(0).uniform(0, 1, (10, 3))
    with pytest.raises(SingleClassInput):
        train_gbdt(X, np.ones(10), TrainConfig())


def test_gbdt_split_thresholds_within_unit_interval():
    X, y = _random_problem(seed=7)
    model = train_gbdt(X, y, TrainConfig(max_rounds=20))
    stack = list(model.trees)
    while stack:
        node = stack.pop()
        if not node.is_leaf:
            assert 0.0 <= node.threshold <= 1.0
            stack.extend([node.left, node.right])


# --- logistic regression -----------------------------------------------

def test_logreg_separable_one_dimensional():
    X = np.array([[0.1]] * 10 + [[0.9]] * 10)
    y = np.array([0.0] * 10 + [1.0] * 10)
    model = train_logreg(X, y, TrainConfig())
    pred = (predict_proba(model, X) >= 0.5).astype(float)
    assert np.array_equal(pred, y)


def test_logreg_all_zero_features_recovers_class_balance():
    X = np.zeros((40, 3))
    y = np.array([1.0] * 30 + [0.0] * 10)
    model = train_logreg(X, y, TrainConfig())
    assert np.allclose(model.weights, 0.0, atol=1e-8)
    assert model.bias == pytest.approx(np.log(0.75 / 0.25), abs=1e-6)


def test_logreg_zero_weights_probability_half():
    from penmetrics.models import LogRegModel
    model = LogRegModel(weights=np.zeros(5), bias=0.0, l2=1.0, n_iters=0)
    X = np.random.default_rng(1).uniform(-4, 4, (12, 5))
    assert np.all(predict_proba(model, X) == 0.5)


def test_logreg_gradient_matches_central_differences():
    rng = np.random.default_rng(8)
    for trial in range(20):
        n, d = 12, 4
        X = rng.uniform(-1, 1, (n, d))
        y = rng.integers(0, 2, n).astype(float)
        w = rng.standard_normal(d)
        b = float(rng.standard_normal())
        l2 = float(rng.uniform(0.1, 3.0))
        _, gw, gb = logreg_nll_grad(w, b, X, y, l2)
        h = 1e-5
        for j in range(d):
            e = np.zeros(d)
            e[j] = h
            hi, _, _ = logreg_nll_grad(w + e, b, X, y, l2)
            lo, _, _ = logreg_nll_grad(w - e, b, X, y, l2)
            num = (hi - lo) / (2 * h)
            assert abs(num - gw[j]) <= 1e-5 * max(1.0, abs(num))
        hi, _, _ = logreg_nll_grad(w, b + h, X, y, l2)
        lo, _, _ = logreg_nll_grad(w, b - h, X, y, l2)
        num = (hi - lo) / (2 * h)
        assert abs(num - gb) <= 1e-5 * max(1.0, abs(num))


def test_logreg_reaches_lower_loss_than_random_parameters():
    X, y = _random_problem(seed=9, n=50, d=6)
    cfg = TrainConfig()
    model = train_logreg(X, y, cfg)
    final, _, _ = logreg_nll_grad(model.weights, model.bias, X, y, cfg.logreg_l2)
    rng = np.random.default_rng(10)
    for _ in range(100):
        w = rng.standard_normal(6) * 3
        b = float(rng.standard_normal() * 3)
        obj, _, _ = logreg_nll_grad(w, b, X, y, cfg.logreg_l2)
        assert final <= obj + 1e-9


def test_logreg_gradient_norm_below_tolerance_at_solution():
    X, y = _random_problem(seed=11, n=50, d=6)
    cfg = TrainConfig()
    model = train_logreg(X, y, cfg)
    _, gw, gb = logreg_nll_grad(model.weights, model.bias, X, y, cfg.logreg_l2)
    assert max(float(np.max(np.abs(gw))), abs(gb)) <= cfg.logreg_tol


def test_logreg_deterministic():
    X, y = _random_problem(seed=12)
    m1 = train_logreg(X, y, TrainConfig())
    m2 = train_logreg(X, y, TrainConfig())
    assert np.array_equal(m1.weights, m2.weights)
    assert m1.bias == m2.bias


def test_logreg_single_class_rejected():
    with pytest.raises(SingleClassInput):
        train_logreg(np.zeros((8, 2)), np.zeros(8), TrainConfig())


def test_non_binary_labels_rejected():
    with pytest.raises(ValueError):
        train_logreg(np.zeros((4, 2)), np.array([0.0, 1.0, 2.0, 1.0]),
                     TrainConfig())


# --- shared prediction contract -----------------------------------------

def test_feature_permutation_equivariance_logreg():
    # Gradient descent treats coordinates symmetrically, so reordering the
    # feature columns must reorder the weights and nothing else. (The GBDT
    # makes no such promise: split-gain ties break toward the lowest feature
    # index so that training is reproducible, which ties tree shape to
    # column order.)
    X, y = _random_problem(seed=13, n=50, d=6)
    perm = np.array([3, 0, 5, 1, 4, 2])
    cfg = TrainConfig(max_rounds=40)

    lr_a = train_logreg(X, y, cfg)
    lr_b = train_logreg(X[:, perm], y, cfg)
    assert np.allclose(lr_b.weights, lr_a.weights[perm], rtol=0, atol=1e-12)
    assert np.allclose(predict_raw(lr_b, X[:, perm]), predict_raw(lr_a, X),
                       rtol=0, atol=1e-12)


def test_row_permutation_equivariance():
    # Training must not depend on sample order. Split thresholds come from
    # per-feature sorted values, so tree shape is exactly stable; leaf sums
    # accumulate in row order, so predictions may wobble at float precision.
    X, y = _random_problem(seed=13, n=50, d=6)
    rows = np.random.default_rng(99).permutation(len(y))
    cfg = TrainConfig(max_rounds=40)

    # Summation order can move the logreg stopping point by one iteration,
    # so its weights agree only to the optimizer tolerance.
    lr_a = train_logreg(X, y, cfg)
    lr_b = train_logreg(X[rows], y[rows], cfg)
    assert np.allclose(lr_b.weights, lr_a.weights, rtol=0, atol=1e-5)

    gb_a = train_gbdt(X, y, cfg)
    gb_b = train_gbdt(X[rows], y[rows], cfg)
    assert len(gb_b.trees) == len(gb_a.trees)
    for ta, tb in zip(gb_a.trees, gb_b.trees):
        assert tb.feature == ta.feature and tb.threshold == ta.threshold
    assert np.allclose(predict_raw(gb_b, X), predict_raw(gb_a, X),
                       rtol=0, atol=1e-9)


def test_dimension_mismatch_rejected():
    X, y = _random_problem(seed=14, n=30, d=5)
    gb = train_gbdt(X, y, TrainConfig(max_rounds=5))
    lr = train_logreg(X, y, TrainConfig())
    bad = np.zeros((3, 4))
    with pytest.raises(DimensionMismatch):
        predict_raw(gb, bad)
    with pytest.raises(DimensionMismatch):
        predict_raw(lr, bad)
    with pytest.raises(DimensionMismatch):
        predict_proba(gb, np.zeros(5))


def test_probabilities_strictly_inside_unit_interval():
    X, y = _random_problem(seed=15)
    for model in (train_gbdt(X, y, TrainConfig(max_rounds=30)),
                  train_logreg(X, y, TrainConfig())):
        p = predict_proba(model, X)
        assert np.all(p > 0.0) and np.all(p < 1.0)


# --- serialization ------------------------------------------------------

def test_gbdt_json_round_trip_reproduces_predictions():
    import json
    X, y = _random_problem(seed=16)
    model = train_gbdt(X, y, TrainConfig(max_rounds=35), X_val=X[:8], y_val=y[:8])
    blob = json.dumps(model_to_dict(model))
    back = model_from_dict(json.loads(blob))
    assert back.best_iteration == model.best_iteration
    assert np.allclose(predict_raw(back, X), predict_raw(model, X),
                       rtol=0, atol=1e-15)


def test_logreg_json_round_trip_reproduces_predictions():
    import json
    X, y = _random_problem(seed=17)
    model = train_logreg(X, y, TrainConfig())
    back = model_from_dict(json.loads(json.dumps(model_to_dict(model))))
    assert np.allclose(predict_raw(back, X), predict_raw(model, X),
                       rtol=0, atol=1e-15)


def test_model_from_dict_rejects_unknown_records():
    with pytest.raises(ValueError):
        model_from_dict({"format": "something.else", "version": 1})
    with pytest.raises(ValueError):
        model_from_dict({"format": "penmetrics.model", "version": 1,
                         "kind": "svm"})
