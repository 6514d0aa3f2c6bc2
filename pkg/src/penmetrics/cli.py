"""Command-line pipeline driver.

Subcommands chain the pipeline stages inside one run directory:

    penmetrics synth      --run DIR    generate a synthetic cohort
    penmetrics extract    --run DIR    recordings -> feature tables
    penmetrics dataset    --run DIR    tables -> normalized task datasets
    penmetrics train-eval --run DIR    LOO evaluation, both models
    penmetrics explain    --run DIR --task EFvsEE --dataset text
    penmetrics report     --run DIR    consolidated metrics CSV

Every command accepts --config PATH (flat key = value file), repeatable
--set key=value overrides, --seed, --jobs, --fold-safe-scaling, and
--print-config. Outputs are written atomically; a run.json provenance
record holds the effective configuration. Failures exit nonzero with a
machine-readable JSON error record on stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

from . import __version__
from .config import RunConfig, config_lines, load_config
from .dataset import (TASK_NAMES, TASK_PAIRS, build_tables, make_task,
                      table_from_csv, table_to_csv)
from .errors import ConfigInvalid, MissingArtifact, PenmetricsError
from .evaluate import final_fit, loo_cv, report_from_dict, report_to_dict
from .explain import (beeswarm_rows, report_to_dict as shap_to_dict,
                      shapley_exact, shapley_sampled)
from .extract import ExtractionConfig, FeatureVector, extract_features
from .kernels import BACKEND
from .models import TrainConfig
from .recording import load_recording, save_recording
from .synth import CohortConfig, generate_cohort
from .util import atomic_write_json, atomic_write_text, sha256_file

DATASET_NAMES = ("text", "list", "textlist")
MODEL_NAMES = ("gbdt", "logreg")

MANIFEST_FIELDS = ["subject_id", "age_group", "task", "seed", "n_samples",
                   "file", "sha256"]


def _extraction_config(cfg: RunConfig) -> ExtractionConfig:
    return ExtractionConfig(
        sample_rate=cfg.sample_rate, force_threshold=cfg.force_threshold,
        min_stroke=cfg.min_stroke, pause_cutoff=cfg.pause_cutoff,
        tilt_alpha=cfg.tilt_alpha, force_prominence=cfg.force_prominence,
        accel_prominence=cfg.accel_prominence, tremor_window=cfg.tremor_window,
        emd_max_imfs=cfg.emd_max_imfs, emd_sift_tol=cfg.emd_sift_tol,
        apen_m=cfg.apen_m, apen_r_factor=cfg.apen_r_factor,
        rqa_dim=cfg.rqa_dim, rqa_delay=cfg.rqa_delay,
        rqa_eps_factor=cfg.rqa_eps_factor, rqa_l_min=cfg.rqa_l_min)


def _train_config(cfg: RunConfig) -> TrainConfig:
    return TrainConfig(
        max_rounds=cfg.gbdt_max_rounds,
        early_stopping_rounds=cfg.gbdt_early_stopping_rounds,
        depth=cfg.gbdt_depth, learning_rate=cfg.gbdt_learning_rate,
        l2_leaf=cfg.gbdt_l2_leaf,
        inner_val_fraction=cfg.gbdt_inner_val_fraction, seed=cfg.seed,
        logreg_l2=cfg.logreg_l2, logreg_tol=cfg.logreg_tol,
        logreg_max_iters=cfg.logreg_max_iters)


def _write_run_record(run_dir: str, cfg: RunConfig) -> None:
    record = {
        "tool": "penmetrics", "version": __version__,
        "kernel_backend": BACKEND,
        "config": json.loads(json.dumps(cfg.__dict__)),
    }
    atomic_write_json(os.path.join(run_dir, "run.json"), record)


def _require(path: str, hint: str) -> str:
    if not os.path.exists(path):
        raise MissingArtifact(f"{path} not found; run `penmetrics {hint}` first")
    return path


def cmd_synth(run_dir: str, cfg: RunConfig) -> None:
    """Generate the synthetic cohort: recordings/*.csv plus manifest.csv."""
    cohort = CohortConfig(
        subjects_per_group=cfg.synth_subjects_per_group,
        samples_text=cfg.synth_samples_text,
        samples_list=cfg.synth_samples_list,
        sample_rate=cfg.sample_rate, seed=cfg.seed,
        gap_scale=cfg.synth_gap_scale)
    recordings, manifest = generate_cohort(cohort)
    rec_dir = os.path.join(run_dir, "recordings")
    os.makedirs(rec_dir, exist_ok=True)
    rows = []
    for rec, entry in zip(recordings, manifest):
        filename = f"{rec.subject_id}_{rec.task}.csv"
        path = os.path.join(rec_dir, filename)
        save_recording(rec, path)
        rows.append({**entry, "file": f"recordings/{filename}",
                     "sha256": sha256_file(path)})
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=MANIFEST_FIELDS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    atomic_write_text(os.path.join(run_dir, "manifest.csv"), buf.getvalue())


def _read_manifest(run_dir: str) -> list[dict]:
    path = _require(os.path.join(run_dir, "manifest.csv"), "synth")
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


def _extract_one(run_dir: str, ecfg: ExtractionConfig, entry: dict) -> FeatureVector:
    rec = load_recording(os.path.join(run_dir, entry["file"]),
                         subject_id=entry["subject_id"], task=entry["task"],
                         age_group=entry["age_group"],
                         sample_rate=ecfg.sample_rate)
    return extract_features(rec, ecfg)


def cmd_extract(run_dir: str, cfg: RunConfig) -> None:
    """Extract the indicator vector of every manifest recording and write
    the three feature tables."""
    manifest = _read_manifest(run_dir)
    ecfg = _extraction_config(cfg)
    if cfg.jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        from functools import partial
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            vectors = list(pool.map(partial(_extract_one, run_dir, ecfg),
                                    manifest))
    else:
        vectors = [_extract_one(run_dir, ecfg, entry) for entry in manifest]
    tables = build_tables(vectors)
    feat_dir = os.path.join(run_dir, "features")
    os.makedirs(feat_dir, exist_ok=True)
    for name, table in tables.items():
        atomic_write_text(os.path.join(feat_dir, f"{name}.csv"),
                          table_to_csv(table))


def _load_table(run_dir: str, name: str):
    path = _require(os.path.join(run_dir, "features", f"{name}.csv"), "extract")
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return table_from_csv(fh.read(), name)


def _selected_tasks(cfg: RunConfig) -> list[tuple[str, str, str]]:
    return [(f"{a}vs{b}", a, b) for a, b in TASK_PAIRS]


def cmd_dataset(run_dir: str, cfg: RunConfig) -> None:
    """Write every task dataset as CSV plus a JSON sidecar with the
    normalization parameters."""
    out_dir = os.path.join(run_dir, "datasets")
    os.makedirs(out_dir, exist_ok=True)
    for ds_name in DATASET_NAMES:
        table = _load_table(run_dir, ds_name)
        for task_name, younger, older in _selected_tasks(cfg):
            ds = make_task(table, younger, older)
            buf = io.StringIO()
            writer = csv.writer(buf, lineterminator="\n")
            writer.writerow(["subject_id", "label", *ds.feature_names])
            for sid, label, row in zip(ds.subject_ids, ds.y, ds.X):
                writer.writerow([sid, int(label), *[repr(float(v)) for v in row]])
            stem = os.path.join(out_dir, f"{ds_name}_{task_name}")
            atomic_write_text(stem + ".csv", buf.getvalue())
            atomic_write_json(stem + ".json", {
                "task": task_name, "dataset": ds_name,
                "positive_class": ds.positive_class,
                "feature_names": list(ds.feature_names),
                "norm_params": [[lo, hi] for lo, hi in ds.norm_params],
                "fold_safe_scaling": cfg.fold_safe_scaling,
            })


def cmd_train_eval(run_dir: str, cfg: RunConfig) -> None:
    """LOO-evaluate both model kinds on every dataset x task pair."""
    tcfg = _train_config(cfg)
    eval_dir = os.path.join(run_dir, "eval")
    os.makedirs(eval_dir, exist_ok=True)
    for ds_name in DATASET_NAMES:
        table = _load_table(run_dir, ds_name)
        for task_name, younger, older in _selected_tasks(cfg):
            ds = make_task(table, younger, older)
            for model_kind in MODEL_NAMES:
                report = loo_cv(ds, model_kind, tcfg, dataset_name=ds_name,
                                fold_safe=cfg.fold_safe_scaling, jobs=cfg.jobs)
                atomic_write_json(
                    os.path.join(eval_dir,
                                 f"{model_kind}_{task_name}_{ds_name}.json"),
                    report_to_dict(report))


def cmd_explain(run_dir: str, cfg: RunConfig, task: str, ds_name: str,
                model_kind: str) -> None:
    """Refit on the full task dataset and attribute its predictions."""
    if task not in TASK_NAMES:
        raise ConfigInvalid(f"task must be one of {TASK_NAMES}")
    if ds_name not in DATASET_NAMES:
        raise ConfigInvalid(f"dataset must be one of {DATASET_NAMES}")
    if model_kind not in MODEL_NAMES:
        raise ConfigInvalid(f"model must be one of {MODEL_NAMES}")
    table = _load_table(run_dir, ds_name)
    younger, older = next((a, b) for a, b in TASK_PAIRS if f"{a}vs{b}" == task)
    ds = make_task(table, younger, older)
    eval_path = _require(
        os.path.join(run_dir, "eval", f"{model_kind}_{task}_{ds_name}.json"),
        "train-eval")
    with open(eval_path, "r", encoding="utf-8") as fh:
        eval_report = report_from_dict(json.load(fh))
    model = final_fit(ds, model_kind, _train_config(cfg),
                      rounds=eval_report.mean_best_iteration)
    if ds.X.shape[1] <= cfg.explain_max_exact_features:
        shap = shapley_exact(model, ds.X, ds.X,
                             feature_names=ds.feature_names,
                             sample_ids=ds.subject_ids,
                             max_features=cfg.explain_max_exact_features)
    else:
        shap = shapley_sampled(model, ds.X, ds.X,
                               n_permutations=cfg.explain_n_permutations,
                               seed=cfg.seed, feature_names=ds.feature_names,
                               sample_ids=ds.subject_ids)
    out_dir = os.path.join(run_dir, "explain")
    os.makedirs(out_dir, exist_ok=True)
    stem = os.path.join(out_dir, f"{model_kind}_{task}_{ds_name}")
    atomic_write_json(stem + ".shap.json", shap_to_dict(shap))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["feature", "sample_id", "feature_value", "phi"])
    for row in beeswarm_rows(shap):
        writer.writerow([row["feature"], row["sample_id"],
                         repr(row["feature_value"]), repr(row["phi"])])
    atomic_write_text(stem + ".beeswarm.csv", buf.getvalue())


def _format_metric(value: float | None) -> str:
    return "" if value is None else f"{value:.1f}"


def cmd_report(run_dir: str, cfg: RunConfig) -> None:
    """Consolidate eval records into metrics.csv, one row per model x task
    x dataset, metrics at one decimal."""
    eval_dir = _require(os.path.join(run_dir, "eval"), "train-eval")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["model", "dataset", "task", "accuracy", "precision",
                     "recall", "f1", "roc_auc", "mean_best_iteration"])
    n_rows = 0
    for model_kind in MODEL_NAMES:
        for ds_name in DATASET_NAMES:
            for task_name, _, _ in _selected_tasks(cfg):
                path = os.path.join(
                    eval_dir, f"{model_kind}_{task_name}_{ds_name}.json")
                if not os.path.exists(path):
                    continue
                with open(path, "r", encoding="utf-8") as fh:
                    rep = report_from_dict(json.load(fh))
                writer.writerow([
                    model_kind, ds_name, task_name,
                    _format_metric(rep.accuracy), _format_metric(rep.precision),
                    _format_metric(rep.recall), _format_metric(rep.f1),
                    _format_metric(rep.roc_auc), rep.mean_best_iteration])
                n_rows += 1
    if n_rows == 0:
        raise MissingArtifact("no evaluation records found; run train-eval")
    atomic_write_text(os.path.join(run_dir, "metrics.csv"), buf.getvalue())


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="penmetrics",
        description="Handwriting/tremor indicator pipeline on pen recordings.")
    sub = parser.add_subparsers(dest="command", required=True)
    specs = {
        "synth": "generate a seeded synthetic cohort",
        "extract": "extract indicator vectors from recordings",
        "dataset": "build normalized task datasets",
        "train-eval": "leave-one-out evaluation of both models",
        "explain": "Shapley attribution for one task dataset",
        "report": "consolidated metrics CSV",
    }
    for name, help_text in specs.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--run", required=True, help="run directory")
        p.add_argument("--config", default=None, help="flat key=value file")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override one config key (repeatable)")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--jobs", type=int, default=None)
        p.add_argument("--fold-safe-scaling", action="store_true",
                       help="refit min-max scaling inside each training fold")
        p.add_argument("--print-config", action="store_true",
                       help="print the effective configuration and exit")
        if name == "explain":
            p.add_argument("--task", required=True,
                           help=f"one of {', '.join(TASK_NAMES)}")
            p.add_argument("--dataset", default="text",
                           help=f"one of {', '.join(DATASET_NAMES)}")
            p.add_argument("--model", default="gbdt",
                           help=f"one of {', '.join(MODEL_NAMES)}")
    return parser


def _effective_config(args) -> RunConfig:
    overrides: dict[str, str] = {}
    for item in args.set:
        if "=" not in item:
            raise ConfigInvalid(f"--set expects KEY=VALUE, got {item!r}")
        key, _, value = item.partition("=")
        overrides[key.strip()] = value.strip()
    if args.seed is not None:
        overrides["seed"] = str(args.seed)
    if args.jobs is not None:
        overrides["jobs"] = str(args.jobs)
    if args.fold_safe_scaling:
        overrides["fold_safe_scaling"] = "true"
    return load_config(args.config, overrides)


def main(argv=None) -> int:
    """Entry point; returns the process exit code."""
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _effective_config(args)
        if args.print_config:
            sys.stdout.write(config_lines(cfg))
            return 0
        run_dir = args.run
        os.makedirs(run_dir, exist_ok=True)
        _write_run_record(run_dir, cfg)
        if args.command == "synth":
            cmd_synth(run_dir, cfg)
        elif args.command == "extract":
            cmd_extract(run_dir, cfg)
        elif args.command == "dataset":
            cmd_dataset(run_dir, cfg)
        elif args.command == "train-eval":
            cmd_train_eval(run_dir, cfg)
        elif args.command == "explain":
            cmd_explain(run_dir, cfg, args.task, args.dataset, args.model)
        elif args.command == "report":
            cmd_report(run_dir, cfg)
        return 0
    except ConfigInvalid as exc:
        sys.stderr.write(json.dumps(
            {"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return 2
    except (PenmetricsError, ValueError, OSError) as exc:
        sys.stderr.write(json.dumps(
            {"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return 1


def main_entry() -> None:
    raise SystemExit(main())
