"""Feature tables and per-task training datasets.

Three tables come out of extraction: one per writing task (14 columns) and
a combined table whose rows concatenate both tasks (28 columns, suffixed
per task). Classification tasks pair a younger and an older age group;
rows are labelled 1 for the older group and features are min-max scaled
per task.
"""

from __future__ import annotations

import csv
import io
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import MalformedInput, MissingTask, UnknownGroup
from .extract import FEATURE_NAMES, FeatureVector
from .recording import AGE_GROUPS, TASKS

TASK_PAIRS = (
    ("YY", "EY"), ("EY", "EF"), ("EF", "EE"), ("YY", "EE"), ("EY", "EE"),
)
TASK_NAMES = tuple(f"{a}vs{b}" for a, b in TASK_PAIRS)


@dataclass
class FeatureTable:
    """Rows of named feature values; NaN marks a missing value."""

    name: str
    feature_names: tuple[str, ...]
    subject_ids: list[str]
    age_groups: list[str]
    X: np.ndarray  # (n_rows, n_features)


@dataclass
class TaskDataset:
    """One binary age-pair classification task, scaled and labelled."""

    task_name: str
    X: np.ndarray       # scaled features, (n, d)
    y: np.ndarray       # 1 = older group
    subject_ids: list[str]
    feature_names: tuple[str, ...]
    norm_params: list[tuple[float, float]]  # per-column (min, max) pre-scaling
    positive_class: str
    X_raw: np.ndarray   # imputed but unscaled features


def build_tables(vectors: list[FeatureVector]) -> dict[str, FeatureTable]:
    """Assemble the per-task and combined feature tables.

    Returns {"text": ..., "list": ..., "textlist": ...}. Rows are sorted by
    subject id; a (subject, task) pair may appear once. Subjects lacking
    either task are dropped from the combined table with a MissingTask
    warning.
    """
    by_task: dict[str, dict[str, FeatureVector]] = {t: {} for t in TASKS}
    for vec in vectors:
        if vec.task not in TASKS:
            raise MalformedInput(f"unknown task {vec.task!r}")
        if vec.subject_id in by_task[vec.task]:
            raise MalformedInput(
                f"duplicate rows for subject {vec.subject_id!r} task {vec.task!r}")
        missing = [k for k in FEATURE_NAMES if k not in vec.values]
        if missing:
            raise MalformedInput(
                f"subject {vec.subject_id!r} lacks features {missing}")
        by_task[vec.task][vec.subject_id] = vec

    def single(task: str, name: str) -> FeatureTable:
        subjects = sorted(by_task[task])
        rows = [by_task[task][s] for s in subjects]
        X = (np.vstack([r.as_array() for r in rows])
             if rows else np.empty((0, len(FEATURE_NAMES))))
        return FeatureTable(name=name, feature_names=FEATURE_NAMES,
                            subject_ids=subjects,
                            age_groups=[r.age_group for r in rows], X=X)

    text = single("Text", "text")
    list_ = single("List", "list")

    both = sorted(set(by_task["Text"]) & set(by_task["List"]))
    only_one = sorted(set(by_task["Text"]) ^ set(by_task["List"]))
    for subject in only_one:
        warnings.warn(f"subject {subject!r} lacks one task; "
                      "dropped from the combined table", MissingTask)
    combined_names = tuple([f"{n}_text" for n in FEATURE_NAMES]
                           + [f"{n}_list" for n in FEATURE_NAMES])
    rows = []
    groups = []
    for subject in both:
        t, l = by_task["Text"][subject], by_task["List"][subject]
        if t.age_group != l.age_group:
            raise MalformedInput(
                f"subject {subject!r} has conflicting age groups")
        rows.append(np.concatenate([t.as_array(), l.as_array()]))
        groups.append(t.age_group)
    X_tl = np.vstack(rows) if rows else np.empty((0, len(combined_names)))
    textlist = FeatureTable(name="textlist", feature_names=combined_names,
                            subject_ids=both, age_groups=groups, X=X_tl)
    return {"text": text, "list": list_, "textlist": textlist}


def normalize_columns(X: np.ndarray) -> tuple[np.ndarray, list[tuple[float, float]]]:
    """Min-max scale each column to [0, 1]; constant columns map to 0.0 and
    keep (c, c) as their parameters."""
    params = []
    out = np.empty_like(X, dtype=float)
    for j in range(X.shape[1]):
        lo, hi = float(np.min(X[:, j])), float(np.max(X[:, j]))
        params.append((lo, hi))
        out[:, j] = 0.0 if hi == lo else (X[:, j] - lo) / (hi - lo)
    return out, params


def apply_normalization(X: np.ndarray,
                        params: list[tuple[float, float]]) -> np.ndarray:
    """Scale columns with previously fitted (min, max) parameters."""
    out = np.empty_like(X, dtype=float)
    for j, (lo, hi) in enumerate(params):
        out[:, j] = 0.0 if hi == lo else (X[:, j] - lo) / (hi - lo)
    return out


def denormalize_columns(X: np.ndarray,
                        params: list[tuple[float, float]]) -> np.ndarray:
    """Inverse of apply_normalization for non-constant columns; constant
    columns recover their stored value."""
    out = np.empty_like(X, dtype=float)
    for j, (lo, hi) in enumerate(params):
        out[:, j] = lo if hi == lo else X[:, j] * (hi - lo) + lo
    return out


def impute_missing(X: np.ndarray) -> np.ndarray:
    """Replace NaN cells with their column median over the given rows; a
    column with no finite value at all becomes 0.0."""
    out = X.astype(float, copy=True)
    for j in range(out.shape[1]):
        col = out[:, j]
        bad = np.isnan(col)
        if not bad.any():
            continue
        if bad.all():
            col[:] = 0.0
        else:
            col[bad] = float(np.nanmedian(col))
    return out


def make_task(table: FeatureTable, younger: str, older: str) -> TaskDataset:
    """Build the binary dataset for one age-group pair.

    Rows from the two groups are taken in table order, missing values are
    imputed with the column median over those rows, and features are
    min-max scaled over the same rows. Label 1 marks the older group.
    """
    for g in (younger, older):
        if g not in AGE_GROUPS:
            raise UnknownGroup(f"{g!r} is not one of {AGE_GROUPS}")
        if g not in table.age_groups:
            raise UnknownGroup(f"group {g!r} has no rows in table {table.name!r}")
    if younger == older:
        raise UnknownGroup(f"need two distinct groups, got {younger!r} twice")
    keep = [i for i, g in enumerate(table.age_groups) if g in (younger, older)]
    X_raw = impute_missing(table.X[keep])
    y = np.array([1 if table.age_groups[i] == older else 0 for i in keep])
    X, params = normalize_columns(X_raw)
    return TaskDataset(
        task_name=f"{younger}vs{older}",
        X=X, y=y,
        subject_ids=[table.subject_ids[i] for i in keep],
        feature_names=table.feature_names,
        norm_params=params,
        positive_class=older,
        X_raw=X_raw,
    )


def table_to_csv(table: FeatureTable) -> str:
    """Deterministic CSV text: subject_id, age_group, then feature columns.
    Missing values serialize as nan."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["subject_id", "age_group", *table.feature_names])
    for sid, grp, row in zip(table.subject_ids, table.age_groups, table.X):
        writer.writerow([sid, grp, *[repr(float(v)) for v in row]])
    return buf.getvalue()


def table_from_csv(text: str, name: str) -> FeatureTable:
    """Parse a table written by table_to_csv."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise MalformedInput("empty table") from None
    if header[:2] != ["subject_id", "age_group"]:
        raise MalformedInput("table header must start subject_id,age_group")
    feature_names = tuple(header[2:])
    subjects, groups, rows = [], [], []
    for row in reader:
        if not row:
            continue
        if len(row) != len(header):
            raise MalformedInput(f"row width {len(row)} != header {len(header)}")
        subjects.append(row[0])
        groups.append(row[1])
        try:
            rows.append([float(v) for v in row[2:]])
        except ValueError as exc:
            raise MalformedInput(f"non-numeric feature value: {exc}") from None
    X = np.asarray(rows, dtype=float) if rows else np.empty((0, len(feature_names)))
    return FeatureTable(name=name, feature_names=feature_names,
                        subject_ids=subjects, age_groups=groups, X=X)
