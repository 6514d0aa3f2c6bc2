"""Shared fixtures: one small synthetic cohort reused across the suite, plus
the acceptance-criteria summary printed at the end of the run."""

from __future__ import annotations

import warnings

import numpy as np
import pytest

# (criterion number, description, passed) appended by tests/test_acceptance.py
ACCEPTANCE_RESULTS: list[tuple[int, str, bool]] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, description, passed in sorted(ACCEPTANCE_RESULTS):
        verdict = "PASS" if passed else "FAIL"
        terminalreporter.write_line(
            f"criterion {number}: {verdict} - {description}")

from penmetrics.dataset import build_tables
from penmetrics.extract import ExtractionConfig, extract_features
from penmetrics.recording import PenRecording, uniform_grid
from penmetrics.synth import CohortConfig, generate_cohort


def make_recording(force, accel=None, gyro=None, sample_rate=50.0,
                   subject_id="S00", task="Text", age_group="YY"):
    """Build a valid recording around explicit channels (defaults: resting
    pen held vertical)."""
    force = np.asarray(force, dtype=float)
    n = len(force)
    if accel is None:
        accel = np.tile([0.0, 0.0, 9.81], (n, 1))
    if gyro is None:
        gyro = np.zeros((n, 3))
    return PenRecording(
        timestamps=uniform_grid(n, sample_rate),
        accel=np.asarray(accel, dtype=float),
        gyro=np.asarray(gyro, dtype=float),
        force=force, sample_rate=sample_rate,
        subject_id=subject_id, task=task, age_group=age_group)


def writing_force(n, sample_rate=50.0, stroke_s=1.0, gap_s=0.5, level=1.0):
    """Square-wave force trace: alternating strokes and gaps, starting and
    ending with a stroke."""
    stroke_n = int(round(stroke_s * sample_rate))
    gap_n = int(round(gap_s * sample_rate))
    out = []
    while len(out) < n:
        out.extend([level] * stroke_n)
        out.extend([0.0] * gap_n)
    return np.array(out[:n])


@pytest.fixture(scope="session")
def small_cohort():
    cfg = CohortConfig(subjects_per_group=5, samples_text=2000,
                       samples_list=1500, seed=424242)
    recordings, manifest = generate_cohort(cfg)
    return cfg, recordings, manifest


@pytest.fixture(scope="session")
def small_vectors(small_cohort):
    _, recordings, _ = small_cohort
    ecfg = ExtractionConfig()
    return [extract_features(rec, ecfg) for rec in recordings]


@pytest.fixture(scope="session")
def small_tables(small_vectors):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return build_tables(small_vectors)
