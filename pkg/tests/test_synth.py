"""Synthetic cohort generator: determinism, validity, group trends."""

from __future__ import annotations

import numpy as np
import pytest

from penmetrics import (
    CohortConfig,
    DEFAULT_GROUPS,
    GroupParams,
    TaskDataset,
    TrainConfig,
    generate_cohort,
    generate_subject,
    loo_cv,
    scale_group_gaps,
    segment_strokes,
    temporal_indicators,
    validate,
)
from dataclasses import fields, replace


def test_generate_subject_bitwise_deterministic():
    g = DEFAULT_GROUPS["EF"]
    a = generate_subject(g, "Text", 1500, 50.0, subject_seed=99)
    b = generate_subject(g, "Text", 1500, 50.0, subject_seed=99)
    assert np.array_equal(a.timestamps, b.timestamps)
    assert np.array_equal(a.accel, b.accel)
    assert np.array_equal(a.gyro, b.gyro)
    assert np.array_equal(a.force, b.force)


def test_generate_subject_seed_changes_output():
    g = DEFAULT_GROUPS["EF"]
    a = generate_subject(g, "Text", 1500, 50.0, subject_seed=1)
    b = generate_subject(g, "Text", 1500, 50.0, subject_seed=2)
    assert not np.array_equal(a.force, b.force)


def test_generate_subject_output_is_valid_recording():
    for name, g in DEFAULT_GROUPS.items():
        rec = generate_subject(g, "List", 1200, 50.0, subject_seed=5,
                               subject_id=f"{name}00", age_group=name)
        validate(rec)  # raises on any malformed channel
        assert rec.age_group == name
        assert len(rec.force) == 1200
        assert rec.force.min() >= 0.0


def test_cohort_has_one_recording_per_subject_task():
    cfg = CohortConfig(subjects_per_group=2, samples_text=600,
                       samples_list=500, seed=7)
    recordings, manifest = generate_cohort(cfg)
    assert len(recordings) == 16   # 4 groups x 2 subjects x 2 tasks
    assert len(manifest) == 16
    ids = {(r.subject_id, r.task) for r in recordings}
    assert len(ids) == 16
    for row, rec in zip(manifest, recordings):
        assert row["subject_id"] == rec.subject_id
        assert row["task"] == rec.task
        assert row["n_samples"] == len(rec.force)


def test_cohort_regenerates_from_manifest_seeds():
    cfg = CohortConfig(subjects_per_group=2, samples_text=600,
                       samples_list=500, seed=11)
    recordings, manifest = generate_cohort(cfg)
    for row, rec in zip(manifest, recordings):
        again = generate_subject(DEFAULT_GROUPS[row["age_group"]], row["task"],
                                 row["n_samples"], cfg.sample_rate,
                                 row["seed"], subject_id=row["subject_id"],
                                 age_group=row["age_group"])
        assert np.array_equal(again.accel, rec.accel)
        assert np.array_equal(again.force, rec.force)


def test_cohort_same_seed_is_bitwise_identical():
    cfg = CohortConfig(subjects_per_group=2, samples_text=500,
                       samples_list=400, seed=21)
    rec1, man1 = generate_cohort(cfg)
    rec2, man2 = generate_cohort(cfg)
    assert man1 == man2
    for a, b in zip(rec1, rec2):
        assert np.array_equal(a.accel, b.accel)
        assert np.array_equal(a.gyro, b.gyro)
        assert np.array_equal(a.force, b.force)


def test_zero_variability_subject_has_predictable_stroke_count():
    # strip all randomness that affects the force gate: constant durations,
    # no pauses, fixed force level, no sensor noise on the force channel
    g = replace(DEFAULT_GROUPS["YY"], stroke_sd=0.0, gap_sd=0.0,
                pause_rate=0.0, force_sd=0.0, noise_floor=0.0)
    rec = generate_subject(g, "Text", 2000, 50.0, subject_seed=3)
    # oracle: count rising edges of the force gate directly
    on = rec.force > 0.0
    rises = int(np.sum(~on[:-1] & on[1:])) + int(on[0])
    seg = segment_strokes(rec, force_threshold=0.05)
    assert len(seg.strokes) <= rises
    assert len(seg.strokes) >= rises - 2  # edge strokes may be discarded


def test_oldest_group_writes_with_longer_air_time():
    g_yy, g_ee = DEFAULT_GROUPS["YY"], DEFAULT_GROUPS["EE"]
    in_air = {"YY": [], "EE": []}
    for k in range(60):
        for name, g in (("YY", g_yy), ("EE", g_ee)):
            rec = generate_subject(g, "Text", 1200, 50.0, subject_seed=1000 + k)
            seg = segment_strokes(rec)
            _, air, _ = temporal_indicators(seg)
            in_air[name].append(air)
    assert np.mean(in_air["EE"]) > np.mean(in_air["YY"]) * 1.5


def test_force_level_decreases_with_age():
    means = {}
    for name in ("YY", "EE"):
        vals = []
        for k in range(30):
            rec = generate_subject(DEFAULT_GROUPS[name], "Text", 1000, 50.0,
                                   subject_seed=2000 + k)
            vals.append(rec.force[rec.force > 0.05].mean())
        means[name] = np.mean(vals)
    assert means["EE"] < means["YY"]


def test_scale_group_gaps_identity_at_one():
    scaled = scale_group_gaps(DEFAULT_GROUPS, 1.0)
    assert scaled == DEFAULT_GROUPS


def test_scale_group_gaps_zero_collapses_all_fields():
    collapsed = scale_group_gaps(DEFAULT_GROUPS, 0.0)
    for fld in fields(GroupParams):
        vals = {getattr(collapsed[g], fld.name) for g in collapsed}
        assert len(vals) == 1, fld.name


def test_scale_group_gaps_preserves_cross_group_mean():
    scaled = scale_group_gaps(DEFAULT_GROUPS, 0.4)
    for fld in fields(GroupParams):
        before = np.mean([getattr(DEFAULT_GROUPS[g], fld.name)
                          for g in DEFAULT_GROUPS])
        after = np.mean([getattr(scaled[g], fld.name) for g in scaled])
        assert after == pytest.approx(before, rel=1e-12)


def test_generate_cohort_rejects_incomplete_group_table():
    cfg = CohortConfig(subjects_per_group=1, samples_text=400,
                       samples_list=400,
                       groups={"YY": DEFAULT_GROUPS["YY"]})
    with pytest.raises(ValueError, match="lacks"):
        generate_cohort(cfg)


def test_group_separation_shrinks_with_gap_scale(small_cohort, small_tables):
    """A collapsed parameter table must erase most of the class signal."""
    import warnings

    from penmetrics import extract_features, build_tables, make_task

    cfg, _, _ = small_cohort

    # full-separation AUC from the session cohort (gap_scale = 1)
    ds_full = make_task(small_tables["text"], "YY", "EE")
    full = loo_cv(ds_full, "logreg", TrainConfig()).roc_auc

    # nearly collapsed table: same subject count and seed, gap_scale 0.1
    flat_cfg = CohortConfig(subjects_per_group=cfg.subjects_per_group,
                            samples_text=cfg.samples_text,
                            samples_list=cfg.samples_list,
                            seed=cfg.seed, gap_scale=0.1)
    recs, _ = generate_cohort(flat_cfg)
    flat_vectors = [extract_features(r) for r in recs if r.task == "Text"]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # List rows absent by construction
        flat_table = build_tables(flat_vectors)["text"]
    ds_flat = make_task(flat_table, "YY", "EE")
    flat = loo_cv(ds_flat, "logreg", TrainConfig()).roc_auc

    assert full == 100.0
    assert flat < full - 15.0
