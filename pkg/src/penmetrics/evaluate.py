"""Leave-one-out evaluation, classification metrics, and final fits.

Metrics are percentages. Precision, recall, and F1 with a zero denominator
are reported as missing (None), never as 0. ROC-AUC uses average ranks, so
tied probabilities contribute half a concordant pair.
"""

from __future__ import annotations

import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from functools import partial

import numpy as np
from scipy.stats import rankdata

from .dataset import TaskDataset, apply_normalization, normalize_columns
from .errors import SingleClassInput
from .models import TrainConfig, predict_proba, train_gbdt, train_logreg

MODEL_KINDS = ("gbdt", "logreg")


@dataclass
class ConfusionMatrix:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def n(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


@dataclass
class EvalReport:
    """Outcome of one model on one task dataset."""

    model_kind: str
    task_name: str
    dataset: str
    fold_safe: bool
    subject_ids: list[str]
    y_true: np.ndarray
    probs: np.ndarray
    confusion: ConfusionMatrix
    accuracy: float
    precision: float | None
    recall: float | None
    f1: float | None
    roc_auc: float
    best_iterations: list[int]
    mean_best_iteration: int


def confusion_from_predictions(y_true: np.ndarray, probs: np.ndarray,
                               threshold: float = 0.5) -> ConfusionMatrix:
    """Count outcomes at the decision threshold; p >= threshold predicts 1."""
    y = np.asarray(y_true).astype(int)
    pred = (np.asarray(probs) >= threshold).astype(int)
    return ConfusionMatrix(
        tp=int(np.sum((pred == 1) & (y == 1))),
        fp=int(np.sum((pred == 1) & (y == 0))),
        fn=int(np.sum((pred == 0) & (y == 1))),
        tn=int(np.sum((pred == 0) & (y == 0))),
    )


def metrics_from_confusion(cm: ConfusionMatrix) -> dict[str, float | None]:
    """accuracy / precision / recall / f1 as percentages; undefined ratios
    (zero denominator) come back as None."""
    if cm.n == 0:
        raise ValueError("empty confusion matrix")
    accuracy = 100.0 * (cm.tp + cm.tn) / cm.n
    precision = (100.0 * cm.tp / (cm.tp + cm.fp)) if cm.tp + cm.fp else None
    recall = (100.0 * cm.tp / (cm.tp + cm.fn)) if cm.tp + cm.fn else None
    f1_den = 2 * cm.tp + cm.fp + cm.fn
    f1 = (100.0 * 2 * cm.tp / f1_den) if f1_den else None
    return {"accuracy": accuracy, "precision": precision,
            "recall": recall, "f1": f1}


def roc_auc(probs: np.ndarray, labels: np.ndarray) -> float:
    """Rank-based ROC-AUC as a percentage, ties counted half."""
    labels = np.asarray(labels).astype(int)
    probs = np.asarray(probs, dtype=float)
    n_pos = int(labels.sum())
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise SingleClassInput("ROC-AUC needs both classes")
    ranks = rankdata(probs)
    auc = (float(ranks[labels == 1].sum()) - n_pos * (n_pos + 1) / 2.0) \
        / (n_pos * n_neg)
    return 100.0 * auc


def _subject_rng(seed: int, subject_id: str) -> np.random.Generator:
    """Fold RNG keyed by held-out subject, so row order cannot matter."""
    return np.random.default_rng([seed, zlib.crc32(subject_id.encode("utf-8"))])


def _inner_split(y_train: np.ndarray, rng: np.random.Generator,
                 fraction: float) -> np.ndarray:
    """Boolean mask of validation rows: a stratified draw of about the given
    fraction, at least one row per class, never a whole class."""
    mask = np.zeros(len(y_train), dtype=bool)
    for cls in (0, 1):
        idx = np.nonzero(y_train == cls)[0]
        n_val = min(max(1, int(np.floor(fraction * len(idx) + 0.5))),
                    len(idx) - 1)
        if n_val > 0:
            mask[rng.permutation(idx)[:n_val]] = True
    return mask


def _canonical_order(ds: TaskDataset) -> list[int]:
    return sorted(range(len(ds.subject_ids)), key=ds.subject_ids.__getitem__)


def _fold_prob(ds: TaskDataset, model_kind: str, cfg: TrainConfig,
               fold_safe: bool, order: list[int], pos: int) -> tuple[float, int]:
    """Train on all rows but one, return (held-out probability, model size:
    best_iteration for gbdt, n_iters for logreg)."""
    held = order[pos]
    train_rows = [order[k] for k in range(len(order)) if k != pos]
    if fold_safe:
        X_all = ds.X_raw
        X_train, params = normalize_columns(X_all[train_rows])
        X_held = apply_normalization(X_all[held:held + 1], params)
    else:
        X_train = ds.X[train_rows]
        X_held = ds.X[held:held + 1]
    y_train = ds.y[train_rows]
    if model_kind == "gbdt":
        rng = _subject_rng(cfg.seed, ds.subject_ids[held])
        val_mask = _inner_split(y_train, rng, cfg.inner_val_fraction)
        model = train_gbdt(X_train[~val_mask], y_train[~val_mask], cfg,
                           X_train[val_mask], y_train[val_mask])
        size = model.best_iteration
    elif model_kind == "logreg":
        model = train_logreg(X_train, y_train, cfg)
        size = model.n_iters
    else:
        raise ValueError(f"model_kind must be one of {MODEL_KINDS}")
    return float(predict_proba(model, X_held)[0]), size


def loo_cv(ds: TaskDataset, model_kind: str, cfg: TrainConfig,
           dataset_name: str = "", fold_safe: bool = False,
           jobs: int = 1) -> EvalReport:
    """Leave-one-out cross-validation over the dataset rows.

    Rows are visited in subject-id order regardless of input row order, so
    every statistic here is invariant to row shuffling. jobs > 1 evaluates
    folds in worker processes; results are identical to the serial run.
    """
    if model_kind not in MODEL_KINDS:
        raise ValueError(f"model_kind must be one of {MODEL_KINDS}")
    order = _canonical_order(ds)
    n = len(order)
    if n < 2 or len(np.unique(ds.y)) < 2:
        raise SingleClassInput("LOO needs at least one row of each class")
    run = partial(_fold_prob, ds, model_kind, cfg, fold_safe, order)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run, range(n), chunksize=max(1, n // (4 * jobs))))
    else:
        results = [run(pos) for pos in range(n)]
    probs = np.array([r[0] for r in results])
    sizes = [r[1] for r in results]
    y = ds.y[order].astype(int)
    cm = confusion_from_predictions(y, probs)
    metrics = metrics_from_confusion(cm)
    mean_best = max(1, int(np.floor(float(np.mean(sizes)) + 0.5)))
    return EvalReport(
        model_kind=model_kind, task_name=ds.task_name, dataset=dataset_name,
        fold_safe=fold_safe,
        subject_ids=[ds.subject_ids[i] for i in order],
        y_true=y, probs=probs, confusion=cm,
        accuracy=metrics["accuracy"], precision=metrics["precision"],
        recall=metrics["recall"], f1=metrics["f1"],
        roc_auc=roc_auc(probs, y),
        best_iterations=sizes, mean_best_iteration=mean_best,
    )


def final_fit(ds: TaskDataset, model_kind: str, cfg: TrainConfig,
              rounds: int | None = None):
    """Fit one model on the whole dataset for downstream explanation.

    For gbdt, rounds (typically an LOO report's mean_best_iteration) becomes
    the exact tree count, trained without early stopping.
    """
    if model_kind == "gbdt":
        cfg_final = replace(cfg, max_rounds=int(rounds) if rounds else cfg.max_rounds)
        return train_gbdt(ds.X, ds.y, cfg_final)
    if model_kind == "logreg":
        return train_logreg(ds.X, ds.y, cfg)
    raise ValueError(f"model_kind must be one of {MODEL_KINDS}")


def report_to_dict(report: EvalReport) -> dict:
    """JSON-ready description of an evaluation report."""
    return {
        "format": "penmetrics.eval", "version": 1,
        "model_kind": report.model_kind, "task": report.task_name,
        "dataset": report.dataset, "fold_safe": report.fold_safe,
        "per_sample": [
            {"subject_id": s, "y_true": int(t), "prob": float(p)}
            for s, t, p in zip(report.subject_ids, report.y_true, report.probs)
        ],
        "confusion": {"tp": report.confusion.tp, "fp": report.confusion.fp,
                      "fn": report.confusion.fn, "tn": report.confusion.tn},
        "accuracy": report.accuracy, "precision": report.precision,
        "recall": report.recall, "f1": report.f1, "roc_auc": report.roc_auc,
        "best_iterations": list(map(int, report.best_iterations)),
        "mean_best_iteration": report.mean_best_iteration,
    }


def report_from_dict(obj: dict) -> EvalReport:
    """Inverse of report_to_dict."""
    if obj.get("format") != "penmetrics.eval" or obj.get("version") != 1:
        raise ValueError("not a recognized evaluation record")
    cm = ConfusionMatrix(**obj["confusion"])
    return EvalReport(
        model_kind=obj["model_kind"], task_name=obj["task"],
        dataset=obj["dataset"], fold_safe=bool(obj["fold_safe"]),
        subject_ids=[r["subject_id"] for r in obj["per_sample"]],
        y_true=np.array([r["y_true"] for r in obj["per_sample"]], dtype=int),
        probs=np.array([r["prob"] for r in obj["per_sample"]]),
        confusion=cm, accuracy=obj["accuracy"], precision=obj["precision"],
        recall=obj["recall"], f1=obj["f1"], roc_auc=obj["roc_auc"],
        best_iterations=list(obj["best_iterations"]),
        mean_best_iteration=int(obj["mean_best_iteration"]),
    )
