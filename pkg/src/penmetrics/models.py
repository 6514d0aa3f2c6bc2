"""Binary classifiers: gradient-boosted trees and logistic regression.

Both are implemented from first principles on NumPy. The GBDT fits
regression trees to the logistic loss gradients with second-order leaf
weights and L2 leaf regularization; early stopping watches log-loss on a
held-out validation split. The logistic regression minimizes the
L2-regularized negative log-likelihood (bias unregularized) by full-batch
gradient descent with a backtracking line search.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, SingleClassInput


@dataclass
class TrainConfig:
    """Hyperparameters for both model kinds."""

    max_rounds: int = 500
    early_stopping_rounds: int = 20
    depth: int = 4
    learning_rate: float = 0.1
    l2_leaf: float = 3.0
    inner_val_fraction: float = 0.2
    seed: int = 0
    logreg_l2: float = 1.0
    logreg_tol: float = 1e-6
    logreg_max_iters: int = 10_000


@dataclass
class _TreeNode:
    """One node of a regression tree; leaves carry a weight."""

    feature: int = -1
    threshold: float = 0.0
    left: "_TreeNode | None" = None
    right: "_TreeNode | None" = None
    value: float = 0.0

    @property
    def is_leaf(self) -> bool:
        return self.left is None


@dataclass
class GbdtModel:
    trees: list[_TreeNode]
    learning_rate: float
    base_score: float
    best_iteration: int
    n_features: int


@dataclass
class LogRegModel:
    weights: np.ndarray
    bias: float
    l2: float
    n_iters: int


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-z))


def log_loss_from_raw(y: np.ndarray, raw: np.ndarray) -> float:
    """Mean logistic loss from raw scores, numerically stable."""
    return float(np.mean(np.logaddexp(0.0, raw) - y * raw))


def _leaf_value(g_sum: float, h_sum: float, l2_leaf: float) -> float:
    return -g_sum / (h_sum + l2_leaf)


def _best_split(X: np.ndarray, g: np.ndarray, h: np.ndarray,
                l2_leaf: float) -> tuple[float, int, float]:
    """Exhaustive scan over features and threshold midpoints.

    Returns (gain, feature, threshold) of the best split, gain 0 when no
    split improves. Ties resolve to the lower feature index, then the lower
    threshold (scan order guarantees both).
    """
    G, H = float(g.sum()), float(h.sum())
    parent = G * G / (H + l2_leaf)
    best_gain, best_feature, best_thr = 0.0, -1, 0.0
    for j in range(X.shape[1]):
        xs = X[:, j]
        order = np.argsort(xs, kind="stable")
        xs_s = xs[order]
        gs = np.cumsum(g[order])
        hs = np.cumsum(h[order])
        cuts = np.nonzero(xs_s[1:] > xs_s[:-1])[0]
        if cuts.size == 0:
            continue
        GL, HL = gs[cuts], hs[cuts]
        GR, HR = G - GL, H - HL
        gains = 0.5 * (GL * GL / (HL + l2_leaf)
                       + GR * GR / (HR + l2_leaf) - parent)
        k = int(np.argmax(gains))  # first max = lowest threshold
        if gains[k] > best_gain:
            lo, hi = xs_s[cuts[k]], xs_s[cuts[k] + 1]
            thr = (lo + hi) / 2.0
            if thr >= hi:  # midpoint rounded up to the right value
                thr = lo
            best_gain, best_feature, best_thr = float(gains[k]), j, float(thr)
    return best_gain, best_feature, best_thr


def _first_cut(X: np.ndarray) -> tuple[int, float]:
    """Lowest-index feature with two distinct values and its first midpoint
    threshold; (-1, 0.0) when every column is constant."""
    for j in range(X.shape[1]):
        xs = np.sort(X[:, j])
        cuts = np.nonzero(xs[1:] > xs[:-1])[0]
        if cuts.size:
            lo, hi = xs[cuts[0]], xs[cuts[0] + 1]
            thr = (lo + hi) / 2.0
            return j, float(lo if thr >= hi else thr)
    return -1, 0.0


def _build_tree(X: np.ndarray, g: np.ndarray, h: np.ndarray, depth: int,
                max_depth: int, l2_leaf: float) -> _TreeNode:
    if depth < max_depth and len(g) >= 2:
        gain, feature, thr = _best_split(X, g, h, l2_leaf)
        if gain <= 0.0 and float(g.sum()) == 0.0 and depth + 1 < max_depth:
            # Perfectly balanced node with no informative cut: the leaf would
            # be worth exactly zero, and every cut splits into two nodes that
            # are themselves balanced (otherwise some cut had positive gain).
            # Splitting anyway costs nothing and lets the children separate
            # patterns whose features are individually uninformative.
            feature, thr = _first_cut(X)
            if feature >= 0:
                gain = np.inf
        if gain > 0.0:
            left = X[:, feature] <= thr
            right = ~left
            return _TreeNode(
                feature=feature, threshold=thr,
                left=_build_tree(X[left], g[left], h[left],
                                 depth + 1, max_depth, l2_leaf),
                right=_build_tree(X[right], g[right], h[right],
                                  depth + 1, max_depth, l2_leaf),
            )
    return _TreeNode(value=_leaf_value(float(g.sum()), float(h.sum()), l2_leaf))


def _tree_predict(node: _TreeNode, X: np.ndarray) -> np.ndarray:
    """Vectorized tree evaluation."""
    out = np.empty(len(X))
    stack = [(node, np.arange(len(X)))]
    while stack:
        nd, idx = stack.pop()
        if nd.is_leaf:
            out[idx] = nd.value
            continue
        go_left = X[idx, nd.feature] <= nd.threshold
        stack.append((nd.left, idx[go_left]))
        stack.append((nd.right, idx[~go_left]))
    return out


def _check_labels(y: np.ndarray) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if not np.isin(y, (0.0, 1.0)).all():
        raise ValueError("labels must be 0/1")
    if len(np.unique(y)) < 2:
        raise SingleClassInput("training labels contain a single class")
    return y


def train_gbdt(X: np.ndarray, y: np.ndarray, cfg: TrainConfig,
               X_val: np.ndarray | None = None,
               y_val: np.ndarray | None = None) -> GbdtModel:
    """Boost depth-limited trees on the logistic loss.

    With a validation set, stops early after early_stopping_rounds rounds
    without strict validation-loss improvement; best_iteration is the tree
    count at the best loss seen, and prediction uses only those trees.
    Without one, all max_rounds trees count.
    """
    X = np.asarray(X, dtype=float)
    y = _check_labels(y)
    p0 = float(np.mean(y))
    base = float(np.log(p0 / (1.0 - p0)))
    raw = np.full(len(y), base)
    has_val = X_val is not None
    if has_val:
        y_val = np.asarray(y_val, dtype=float)
        raw_val = np.full(len(y_val), base)
        best_loss = np.inf
        best_iteration = 0
        stale = 0
    trees: list[_TreeNode] = []
    for _ in range(cfg.max_rounds):
        p = _sigmoid(raw)
        tree = _build_tree(X, p - y, p * (1.0 - p), 0, cfg.depth, cfg.l2_leaf)
        trees.append(tree)
        raw = raw + cfg.learning_rate * _tree_predict(tree, X)
        if has_val:
            raw_val = raw_val + cfg.learning_rate * _tree_predict(tree, X_val)
            loss = log_loss_from_raw(y_val, raw_val)
            if loss < best_loss:
                best_loss = loss
                best_iteration = len(trees)
                stale = 0
            else:
                stale += 1
                if stale >= cfg.early_stopping_rounds:
                    break
    if not has_val:
        best_iteration = len(trees)
    return GbdtModel(trees=trees, learning_rate=cfg.learning_rate,
                     base_score=base, best_iteration=best_iteration,
                     n_features=X.shape[1])


def train_logreg(X: np.ndarray, y: np.ndarray, cfg: TrainConfig) -> LogRegModel:
    """Gradient descent with backtracking (Armijo) line search on the
    L2-regularized NLL; the bias is not regularized. Stops when the
    gradient infinity-norm falls below logreg_tol."""
    X = np.asarray(X, dtype=float)
    y = _check_labels(y)
    n, d = X.shape
    w = np.zeros(d)
    b = 0.0
    l2 = cfg.logreg_l2

    def nll(wv: np.ndarray, bv: float) -> float:
        z = X @ wv + bv
        return float(np.sum(np.logaddexp(0.0, z) - y * z)
                     + 0.5 * l2 * np.dot(wv, wv))

    step = 1.0
    iters = 0
    for iters in range(1, cfg.logreg_max_iters + 1):
        z = X @ w + b
        p = _sigmoid(z)
        gw = X.T @ (p - y) + l2 * w
        gb = float(np.sum(p - y))
        if max(float(np.max(np.abs(gw))), abs(gb)) <= cfg.logreg_tol:
            iters -= 1
            break
        loss0 = nll(w, b)
        g2 = float(np.dot(gw, gw)) + gb * gb
        t = step * 2.0
        while True:
            w_new = w - t * gw
            b_new = b - t * gb
            if nll(w_new, b_new) <= loss0 - 1e-4 * t * g2:
                break
            t *= 0.5
            if t < 1e-18:  # numerically flat; no achievable descent
                return LogRegModel(weights=w, bias=b, l2=l2, n_iters=iters - 1)
        w, b = w_new, b_new
        step = t
    return LogRegModel(weights=w, bias=b, l2=l2, n_iters=iters)


def logreg_nll_grad(model_w: np.ndarray, model_b: float, X: np.ndarray,
                    y: np.ndarray, l2: float) -> tuple[float, np.ndarray, float]:
    """(objective, grad_w, grad_b) of the regularized NLL at the given
    parameters; exposed for gradient checking."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    z = X @ model_w + model_b
    obj = float(np.sum(np.logaddexp(0.0, z) - y * z)
                + 0.5 * l2 * np.dot(model_w, model_w))
    p = _sigmoid(z)
    return obj, X.T @ (p - y) + l2 * model_w, float(np.sum(p - y))


def predict_raw(model, X: np.ndarray) -> np.ndarray:
    """Raw scores (log-odds) for either model kind."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise DimensionMismatch(f"X must be 2-d, got shape {X.shape}")
    if isinstance(model, GbdtModel):
        if X.shape[1] != model.n_features:
            raise DimensionMismatch(
                f"model expects {model.n_features} features, got {X.shape[1]}")
        raw = np.full(len(X), model.base_score)
        for tree in model.trees[:model.best_iteration]:
            raw += model.learning_rate * _tree_predict(tree, X)
        return raw
    if isinstance(model, LogRegModel):
        if X.shape[1] != len(model.weights):
            raise DimensionMismatch(
                f"model expects {len(model.weights)} features, got {X.shape[1]}")
        return X @ model.weights + model.bias
    raise TypeError(f"unknown model type {type(model).__name__}")


def predict_proba(model, X: np.ndarray) -> np.ndarray:
    """Probability of the positive (older) class."""
    return _sigmoid(predict_raw(model, X))


def _tree_to_dict(node: _TreeNode) -> dict:
    if node.is_leaf:
        return {"leaf": node.value}
    return {"feature": node.feature, "threshold": node.threshold,
            "left": _tree_to_dict(node.left), "right": _tree_to_dict(node.right)}


def _tree_from_dict(obj: dict) -> _TreeNode:
    if "leaf" in obj:
        return _TreeNode(value=float(obj["leaf"]))
    return _TreeNode(feature=int(obj["feature"]),
                     threshold=float(obj["threshold"]),
                     left=_tree_from_dict(obj["left"]),
                     right=_tree_from_dict(obj["right"]))


def model_to_dict(model) -> dict:
    """JSON-ready description of either model kind (versioned)."""
    if isinstance(model, GbdtModel):
        return {"format": "penmetrics.model", "version": 1, "kind": "gbdt",
                "learning_rate": model.learning_rate,
                "base_score": model.base_score,
                "best_iteration": model.best_iteration,
                "n_features": model.n_features,
                "trees": [_tree_to_dict(t) for t in model.trees]}
    if isinstance(model, LogRegModel):
        return {"format": "penmetrics.model", "version": 1, "kind": "logreg",
                "weights": [float(v) for v in model.weights],
                "bias": model.bias, "l2": model.l2, "n_iters": model.n_iters}
    raise TypeError(f"unknown model type {type(model).__name__}")


def model_from_dict(obj: dict):
    """Inverse of model_to_dict."""
    if obj.get("format") != "penmetrics.model" or obj.get("version") != 1:
        raise ValueError("not a recognized model record")
    if obj["kind"] == "gbdt":
        return GbdtModel(trees=[_tree_from_dict(t) for t in obj["trees"]],
                         learning_rate=float(obj["learning_rate"]),
                         base_score=float(obj["base_score"]),
                         best_iteration=int(obj["best_iteration"]),
                         n_features=int(obj["n_features"]))
    if obj["kind"] == "logreg":
        return LogRegModel(weights=np.asarray(obj["weights"], dtype=float),
                           bias=float(obj["bias"]), l2=float(obj["l2"]),
                           n_iters=int(obj["n_iters"]))
    raise ValueError(f"unknown model kind {obj['kind']!r}")
