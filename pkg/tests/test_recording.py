"""Recording container, CSV/JSON IO, validation, and resampling."""

import io
import json

import numpy as np
import pytest

from penmetrics import (MalformedInput, NegativeForce, NonMonotonicTime,
                        PenRecording, TooShort, load_recording,
                        resample_uniform, save_recording, uniform_grid,
                        validate)

from conftest import make_recording


def _random_recording(n=400, seed=0, fs=50.0):
    rng = np.random.default_rng(seed)
    return PenRecording(
        timestamps=uniform_grid(n, fs),
        accel=rng.normal(0, 1, (n, 3)) + [0, 0, 9.81],
        gyro=rng.normal(0, 10, (n, 3)),
        force=np.abs(rng.normal(1, 0.3, n)),
        sample_rate=fs, subject_id="S1", task="Text", age_group="EY")


def test_csv_round_trip_is_exact(tmp_path):
    rec = _random_recording()
    path = tmp_path / "rec.csv"
    save_recording(rec, path)
    back = load_recording(path, subject_id="S1", task="Text", age_group="EY")
    assert np.array_equal(back.timestamps, rec.timestamps)
    assert np.array_equal(back.accel, rec.accel)
    assert np.array_equal(back.gyro, rec.gyro)
    assert np.array_equal(back.force, rec.force)
    assert back.subject_id == "S1" and back.age_group == "EY"


def test_csv_uses_lf_and_fixed_header(tmp_path):
    rec = _random_recording()
    path = tmp_path / "rec.csv"
    save_recording(rec, path)
    raw = path.read_bytes()
    assert b"\r" not in raw
    assert raw.startswith(b"t,ax,ay,az,gx,gy,gz,f\n")


def test_csv_rejects_wrong_header():
    with pytest.raises(MalformedInput):
        load_recording(io.StringIO("time,ax\n0,1\n"))


def test_json_inline_meta_wins(tmp_path):
    rec = _random_recording()
    payload = {
        "meta": {"subject_id": "INLINE", "task": "List",
                 "age_group": "EE", "sample_rate": 50.0},
        "channels": {
            "t": rec.timestamps.tolist(),
            "ax": rec.accel[:, 0].tolist(), "ay": rec.accel[:, 1].tolist(),
            "az": rec.accel[:, 2].tolist(),
            "gx": rec.gyro[:, 0].tolist(), "gy": rec.gyro[:, 1].tolist(),
            "gz": rec.gyro[:, 2].tolist(),
            "f": rec.force.tolist(),
        },
    }
    path = tmp_path / "rec.json"
    path.write_text(json.dumps(payload))
    back = load_recording(path, format="json", subject_id="KWARG")
    assert back.subject_id == "INLINE"
    assert back.task == "List"
    assert np.allclose(back.force, rec.force)


def test_timestamps_rebased_to_zero(tmp_path):
    rec = _random_recording()
    shifted = PenRecording(
        timestamps=rec.timestamps + 123.456, accel=rec.accel, gyro=rec.gyro,
        force=rec.force, sample_rate=rec.sample_rate, subject_id="S1",
        task="Text", age_group="EY")
    path = tmp_path / "rec.csv"
    save_recording(shifted, path)
    back = load_recording(path)
    assert back.timestamps[0] == 0.0


def test_validate_rejects_bad_containers():
    rec = _random_recording()
    bad = PenRecording(rec.timestamps[::-1].copy(), rec.accel, rec.gyro,
                       rec.force, task="Text")
    with pytest.raises(NonMonotonicTime):
        validate(bad)
    with pytest.raises(TooShort):
        validate(make_recording(np.ones(100)))
    neg = make_recording(np.ones(300))
    neg.force[5] = -0.1
    with pytest.raises(NegativeForce):
        validate(neg)
    shape = PenRecording(rec.timestamps, rec.accel[:, :2], rec.gyro,
                         rec.force, task="Text")
    with pytest.raises(MalformedInput):
        validate(shape)
    nonfinite = make_recording(np.ones(300))
    nonfinite.accel[0, 0] = np.nan
    with pytest.raises(MalformedInput):
        validate(nonfinite)


def test_uniform_grid_is_exact_division():
    g = uniform_grid(1000, 50.0)
    assert g[0] == 0.0
    assert np.array_equal(g, np.arange(1000) / 50.0)


def test_resample_ramp_from_100hz_is_exact():
    n = 600
    t = np.arange(n) / 100.0
    rec = PenRecording(timestamps=t, accel=np.tile(t[:, None], (1, 3)),
                       gyro=np.tile(t[:, None], (1, 3)), force=t.copy(),
                       sample_rate=100.0, task="Text")
    out = resample_uniform(rec, 50.0)
    assert out.sample_rate == 50.0
    expect = out.timestamps
    assert np.allclose(out.force, expect, atol=1e-12)
    assert np.allclose(out.accel[:, 1], expect, atol=1e-12)


def test_resample_jittered_sine_within_interpolation_bound():
    rng = np.random.default_rng(3)
    n, fs, f = 1000, 50.0, 2.0
    dt = (1.0 + 0.4 * rng.uniform(-1, 1, n)) / fs
    t = np.concatenate(([0.0], np.cumsum(dt[:-1])))
    x = np.sin(2 * np.pi * f * t)
    rec = PenRecording(timestamps=t, accel=np.column_stack([x, x, x + 9.81]),
                       gyro=np.zeros((n, 3)), force=np.abs(x),
                       sample_rate=fs, task="Text")
    out = resample_uniform(rec, fs)
    truth = np.sin(2 * np.pi * f * out.timestamps)
    h = float(np.max(np.diff(t)))
    bound = (h ** 2 / 8.0) * (2 * np.pi * f) ** 2
    assert np.max(np.abs(out.accel[:, 0] - truth)) <= bound


def test_resample_idempotent():
    rec = _random_recording(seed=5)
    once = resample_uniform(rec, 50.0)
    twice = resample_uniform(once, 50.0)
    assert np.allclose(once.accel, twice.accel, atol=1e-12)
    assert np.allclose(once.force, twice.force, atol=1e-12)
    assert np.allclose(once.timestamps, twice.timestamps, atol=1e-12)


def test_resample_clamps_force_nonnegative():
    rec = _random_recording(seed=6)
    out = resample_uniform(rec, 50.0)
    assert np.all(out.force >= 0)
