"""Interventional Shapley values for model raw scores.

The coalition value v(S) is the model's raw output (log-odds) with the
features in S pinned to the explained sample and the rest drawn from a
background dataset, averaged over background rows. The exact path
enumerates all 2^d coalitions; the sampled path averages marginal
contributions over random permutations in antithetic pairs (a permutation
and its reverse) and reports a standard error per value.

Both satisfy efficiency by construction: baseline + sum(phi) equals the
raw model output on the explained sample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, TooManyFeaturesForExact
from .models import GbdtModel, _TreeNode, predict_raw

MAX_EXACT_FEATURES = 15


@dataclass
class ShapReport:
    """Per-sample, per-feature attributions in log-odds space."""

    feature_names: tuple[str, ...]
    sample_ids: list[str]
    baseline: float
    phi: np.ndarray             # (n_samples, n_features)
    feature_values: np.ndarray  # the explained rows, same shape
    method: str                 # "exact" | "sampled"
    output_space: str = "log_odds"
    stderr: np.ndarray | None = None
    n_permutations: int | None = None


def _check_inputs(X, background, feature_names):
    X = np.atleast_2d(np.asarray(X, dtype=float))
    background = np.atleast_2d(np.asarray(background, dtype=float))
    if X.shape[1] != background.shape[1]:
        raise DimensionMismatch(
            f"samples have {X.shape[1]} features, background {background.shape[1]}")
    if len(background) == 0:
        raise ValueError("background must have at least one row")
    d = X.shape[1]
    if feature_names is None:
        feature_names = tuple(f"x{j}" for j in range(d))
    feature_names = tuple(feature_names)
    if len(feature_names) != d:
        raise DimensionMismatch(
            f"{len(feature_names)} names for {d} features")
    return X, background, feature_names


def _popcounts(masks: np.ndarray, d: int) -> np.ndarray:
    counts = np.zeros(len(masks), dtype=np.int64)
    for k in range(d):
        counts += (masks >> k) & 1
    return counts


def _shapley_weights(d: int) -> np.ndarray:
    """w[s] = s! (d-s-1)! / d! -- the weight of a coalition of size s that
    excludes the feature being attributed."""
    fact = [math.factorial(k) for k in range(d + 1)]
    return np.array([fact[s] * fact[d - s - 1] / fact[d] for s in range(d)])


def _leaf_paths(node: _TreeNode, conds=()):
    """Yield (leaf value, conditions) with conditions as tuples
    (feature, threshold, go_left)."""
    if node.is_leaf:
        yield node.value, conds
        return
    yield from _leaf_paths(node.left, conds + ((node.feature, node.threshold, True),))
    yield from _leaf_paths(node.right, conds + ((node.feature, node.threshold, False),))


def _coalition_values_gbdt(model: GbdtModel, X: np.ndarray,
                           background: np.ndarray,
                           masks: np.ndarray) -> np.ndarray:
    """v matrix (n_samples, n_masks) for a tree ensemble.

    A leaf fires when every path condition holds; under a coalition mask
    each condition tests the sample value (feature in the mask) or the
    background row (feature outside it). A leaf's conditions touch at most
    depth-many features, so each mask only matters through its projection
    onto those features, and the background average factors into a table
    of at most 2^depth entries per leaf.
    """
    n, d = X.shape
    n_bg = len(background)
    v = np.full((n, len(masks)), model.base_score)
    lr = model.learning_rate
    for tree in model.trees[:model.best_iteration]:
        for value, conds in _leaf_paths(tree):
            if not conds:
                v += lr * value
                continue
            feats = sorted({f for f, _, _ in conds})
            # per condition, satisfaction on the samples and the background
            sample_ok = np.ones((n, len(feats)), dtype=bool)
            bg_ok = np.ones((n_bg, len(feats)), dtype=bool)
            for f, thr, go_left in conds:
                k = feats.index(f)
                s_hit = X[:, f] <= thr if go_left else X[:, f] > thr
                b_hit = (background[:, f] <= thr if go_left
                         else background[:, f] > thr)
                sample_ok[:, k] &= s_hit
                bg_ok[:, k] &= b_hit
            proj = np.zeros(len(masks), dtype=np.int64)
            for k, f in enumerate(feats):
                proj += ((masks >> f) & 1) << k
            n_proj = 1 << len(feats)
            codes = np.arange(n_proj, dtype=np.int64)
            in_proj = ((codes[:, None] >> np.arange(len(feats))[None, :]) & 1).astype(bool)
            # background fraction satisfying the conditions outside the mask
            bg_frac = np.array([
                bg_ok[:, ~in_proj[c]].all(axis=1).mean() for c in range(n_proj)])
            # sample indicator for the conditions inside the mask
            s_ind = np.array([
                sample_ok[:, in_proj[c]].all(axis=1) for c in range(n_proj)]).T
            v += (lr * value) * s_ind[:, proj] * bg_frac[proj]
    return v


def _coalition_values_generic(model, X: np.ndarray, background: np.ndarray,
                              masks: np.ndarray,
                              chunk: int = 2048) -> np.ndarray:
    """v matrix by direct hybrid evaluation, any model with predict_raw."""
    n, d = X.shape
    n_bg = len(background)
    v = np.empty((n, len(masks)))
    bits_all = ((masks[:, None] >> np.arange(d)[None, :]) & 1).astype(bool)
    for i in range(n):
        for lo in range(0, len(masks), chunk):
            bits = bits_all[lo:lo + chunk]
            hybrid = np.where(bits[:, None, :], X[i][None, None, :],
                              background[None, :, :])
            raw = predict_raw(model, hybrid.reshape(-1, d))
            v[i, lo:lo + chunk] = raw.reshape(len(bits), n_bg).mean(axis=1)
    return v


def shapley_exact(model, X: np.ndarray, background: np.ndarray,
                  feature_names=None, sample_ids=None,
                  max_features: int = MAX_EXACT_FEATURES) -> ShapReport:
    """Exact interventional Shapley values by coalition enumeration.

    Refuses more than max_features features (the enumeration is 2^d); use
    shapley_sampled beyond that.
    """
    X, background, feature_names = _check_inputs(X, background, feature_names)
    n, d = X.shape
    if d > max_features:
        raise TooManyFeaturesForExact(
            f"{d} features > exact cap {max_features}; use shapley_sampled")
    masks = np.arange(1 << d, dtype=np.int64)
    if isinstance(model, GbdtModel):
        v = _coalition_values_gbdt(model, X, background, masks)
    else:
        v = _coalition_values_generic(model, X, background, masks)
    weights = _shapley_weights(d)
    sizes = _popcounts(masks, d)
    phi = np.empty((n, d))
    for j in range(d):
        without = masks[((masks >> j) & 1) == 0]
        w = weights[sizes[without]]
        phi[:, j] = (v[:, without | (1 << j)] - v[:, without]) @ w
    return ShapReport(
        feature_names=feature_names,
        sample_ids=list(sample_ids) if sample_ids else
        [f"row{i}" for i in range(n)],
        baseline=float(v[0, 0]), phi=phi, feature_values=X, method="exact",
    )


def shapley_sampled(model, X: np.ndarray, background: np.ndarray,
                    n_permutations: int = 2000, seed: int = 0,
                    feature_names=None, sample_ids=None,
                    chunk_perms: int = 64) -> ShapReport:
    """Permutation-sampling estimate of the same values.

    Each explained sample gets its own RNG stream seeded (seed, sample
    index). Permutations come in antithetic pairs; the standard error is
    over pair means, and efficiency holds exactly because marginal
    contributions telescope along each permutation.
    """
    X, background, feature_names = _check_inputs(X, background, feature_names)
    if n_permutations < 100:
        raise ValueError("need at least 100 permutations")
    n, d = X.shape
    n_bg = len(background)
    n_pairs = (n_permutations + 1) // 2
    phi = np.empty((n, d))
    stderr = np.empty((n, d))
    steps = np.arange(d + 1)
    for i in range(n):
        rng = np.random.default_rng([seed, i])
        pair_means = np.empty((n_pairs, d))
        for lo in range(0, n_pairs, chunk_perms):
            hi = min(lo + chunk_perms, n_pairs)
            forward = np.array([rng.permutation(d) for _ in range(lo, hi)])
            perms = np.empty((2 * (hi - lo), d), dtype=np.int64)
            perms[0::2] = forward
            perms[1::2] = forward[:, ::-1]
            # prefix-membership mask: feature j joins before step k
            pos = np.argsort(perms, axis=1)
            member = pos[:, None, :] < steps[None, :, None]  # (P, d+1, d)
            hybrid = np.where(member[:, :, None, :], X[i][None, None, None, :],
                              background[None, None, :, :])
            raw = predict_raw(model, hybrid.reshape(-1, d))
            v = raw.reshape(len(perms), d + 1, n_bg).mean(axis=2)
            marginals = np.diff(v, axis=1)  # (P, d) in permutation order
            contrib = np.empty_like(marginals)
            np.put_along_axis(contrib, perms, marginals, axis=1)
            pair_means[lo:hi] = 0.5 * (contrib[0::2] + contrib[1::2])
        phi[i] = pair_means.mean(axis=0)
        stderr[i] = (pair_means.std(axis=0, ddof=1) / math.sqrt(n_pairs)
                     if n_pairs > 1 else np.zeros(d))
    baseline = float(predict_raw(model, background).mean())
    return ShapReport(
        feature_names=feature_names,
        sample_ids=list(sample_ids) if sample_ids else
        [f"row{i}" for i in range(n)],
        baseline=baseline, phi=phi, feature_values=X, method="sampled",
        stderr=stderr, n_permutations=2 * n_pairs,
    )


def rank_features(report: ShapReport) -> list[str]:
    """Feature names by descending mean |phi|; exact ties alphabetical."""
    importance = np.mean(np.abs(report.phi), axis=0)
    order = sorted(range(len(report.feature_names)),
                   key=lambda j: (-importance[j], report.feature_names[j]))
    return [report.feature_names[j] for j in order]


def beeswarm_rows(report: ShapReport) -> list[dict]:
    """Flat rows (feature, sample_id, feature value, phi) ordered by the
    importance ranking then by sample, ready for plotting."""
    ranking = rank_features(report)
    col = {name: j for j, name in enumerate(report.feature_names)}
    rows = []
    for name in ranking:
        j = col[name]
        for i, sid in enumerate(report.sample_ids):
            rows.append({"feature": name, "sample_id": sid,
                         "feature_value": float(report.feature_values[i, j]),
                         "phi": float(report.phi[i, j])})
    return rows


def report_to_dict(report: ShapReport) -> dict:
    """JSON-ready description of a Shapley report."""
    return {
        "format": "penmetrics.shap", "version": 1,
        "method": report.method, "output_space": report.output_space,
        "baseline": report.baseline,
        "feature_names": list(report.feature_names),
        "sample_ids": list(report.sample_ids),
        "phi": report.phi.tolist(),
        "feature_values": report.feature_values.tolist(),
        "stderr": None if report.stderr is None else report.stderr.tolist(),
        "n_permutations": report.n_permutations,
        "ranking": rank_features(report),
    }


def report_from_dict(obj: dict) -> ShapReport:
    """Inverse of report_to_dict (the ranking is derived, not stored)."""
    if obj.get("format") != "penmetrics.shap" or obj.get("version") != 1:
        raise ValueError("not a recognized attribution record")
    return ShapReport(
        feature_names=tuple(obj["feature_names"]),
        sample_ids=list(obj["sample_ids"]),
        baseline=float(obj["baseline"]),
        phi=np.asarray(obj["phi"], dtype=float),
        feature_values=np.asarray(obj["feature_values"], dtype=float),
        method=obj["method"], output_space=obj["output_space"],
        stderr=None if obj["stderr"] is None else np.asarray(obj["stderr"]),
        n_permutations=obj["n_permutations"],
    )
