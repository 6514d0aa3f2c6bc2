"""Raw recording container, loaders, and resampling.

A recording is eight synchronized channels from a sensor pen: time, 3-axis
accelerometer (m/s^2), 3-axis gyroscope (deg/s), and tip force (N). The
canonical sample rate is 50 Hz.
"""

from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import dataclass, replace

import numpy as np

from .errors import MalformedInput, NegativeForce, NonMonotonicTime, TooShort

AGE_GROUPS = ("YY", "EY", "EF", "EE")
TASKS = ("Text", "List")
MIN_SAMPLES = 250
CSV_HEADER = ["t", "ax", "ay", "az", "gx", "gy", "gz", "f"]
CHANNEL_NAMES = tuple(CSV_HEADER)


@dataclass
class PenRecording:
    """One subject performing one writing task.

    timestamps are seconds rebased to start at 0; accel/gyro are (n, 3);
    force is (n,). validate() enforces the container invariants.
    """

    timestamps: np.ndarray
    accel: np.ndarray
    gyro: np.ndarray
    force: np.ndarray
    sample_rate: float = 50.0
    subject_id: str = ""
    task: str = "Text"
    age_group: str = "unknown"

    @property
    def n_samples(self) -> int:
        return len(self.timestamps)

    @property
    def duration(self) -> float:
        return float(self.timestamps[-1] - self.timestamps[0])


def validate(rec: PenRecording) -> PenRecording:
    """Check container invariants; returns the recording for chaining."""
    n = rec.n_samples
    if not (len(rec.accel) == len(rec.gyro) == len(rec.force) == n):
        raise MalformedInput(
            f"channel lengths differ: t={n} accel={len(rec.accel)} "
            f"gyro={len(rec.gyro)} force={len(rec.force)}")
    if rec.accel.ndim != 2 or rec.accel.shape[1] != 3:
        raise MalformedInput(f"accel must be (n, 3), got {rec.accel.shape}")
    if rec.gyro.ndim != 2 or rec.gyro.shape[1] != 3:
        raise MalformedInput(f"gyro must be (n, 3), got {rec.gyro.shape}")
    if n < MIN_SAMPLES:
        raise TooShort(f"{n} samples; need at least {MIN_SAMPLES}")
    for name, arr in (("timestamps", rec.timestamps), ("accel", rec.accel),
                      ("gyro", rec.gyro), ("force", rec.force)):
        if not np.all(np.isfinite(arr)):
            raise MalformedInput(f"non-finite values in {name}")
    if np.any(np.diff(rec.timestamps) <= 0):
        raise NonMonotonicTime("timestamps must be strictly increasing")
    if np.any(rec.force < 0):
        raise NegativeForce("force must be non-negative")
    if not rec.sample_rate > 0:
        raise MalformedInput(f"sample_rate must be positive, got {rec.sample_rate}")
    if rec.task not in TASKS:
        raise MalformedInput(f"task must be one of {TASKS}, got {rec.task!r}")
    return rec


def _as_recording(cols: np.ndarray, sample_rate: float, subject_id: str,
                  task: str, age_group: str) -> PenRecording:
    t = cols[:, 0] - cols[0, 0]
    return PenRecording(
        timestamps=t,
        accel=np.ascontiguousarray(cols[:, 1:4]),
        gyro=np.ascontiguousarray(cols[:, 4:7]),
        force=np.ascontiguousarray(cols[:, 7]),
        sample_rate=sample_rate,
        subject_id=subject_id,
        task=task,
        age_group=age_group,
    )


def load_recording(source, format: str = "csv", *, sample_rate: float = 50.0,
                   subject_id: str = "", task: str = "Text",
                   age_group: str = "unknown") -> PenRecording:
    """Parse a recording from a path or readable stream.

    format "csv": header t,ax,ay,az,gx,gy,gz,f then numeric rows. Metadata
    comes from the keyword arguments. format "json": object with "meta"
    (subject_id, task, age_group, sample_rate) and "channels" (eight
    equal-length arrays keyed like the CSV header); inline meta wins over
    the keyword arguments. Timestamps are rebased to start at 0 and the
    result is validated.
    """
    if isinstance(source, (str, os.PathLike)):
        with open(source, "r", encoding="utf-8", newline="") as fh:
            return load_recording(fh, format, sample_rate=sample_rate,
                                  subject_id=subject_id, task=task,
                                  age_group=age_group)
    if format == "csv":
        reader = csv.reader(source)
        try:
            header = next(reader)
        except StopIteration:
            raise MalformedInput("empty input") from None
        if [h.strip() for h in header] != CSV_HEADER:
            raise MalformedInput(
                f"expected header {','.join(CSV_HEADER)}, got {','.join(header)}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 8:
                raise MalformedInput(f"line {lineno}: expected 8 fields, got {len(row)}")
            rows.append(row)
        try:
            cols = np.asarray(rows, dtype=float)
        except ValueError as exc:
            raise MalformedInput(f"non-numeric value: {exc}") from None
        if cols.size == 0:
            raise MalformedInput("no data rows")
        return validate(_as_recording(cols, sample_rate, subject_id, task, age_group))
    if format == "json":
        obj = json.load(source)
        try:
            meta = obj["meta"]
            channels = obj["channels"]
            arrays = [np.asarray(channels[name], dtype=float) for name in CSV_HEADER]
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedInput(f"bad json recording: {exc}") from None
        if len({len(a) for a in arrays}) != 1:
            raise MalformedInput("json channels have unequal lengths")
        cols = np.column_stack(arrays)
        return validate(_as_recording(
            cols,
            float(meta.get("sample_rate", sample_rate)),
            str(meta.get("subject_id", subject_id)),
            str(meta.get("task", task)),
            str(meta.get("age_group", age_group)),
        ))
    raise MalformedInput(f"unknown format {format!r}")


def save_recording(rec: PenRecording, path) -> None:
    """Write a recording as CSV (UTF-8, LF endings, repr-precision floats)."""
    buf = io.StringIO()
    buf.write(",".join(CSV_HEADER) + "\n")
    cols = np.column_stack([rec.timestamps, rec.accel, rec.gyro, rec.force])
    for row in cols:
        buf.write(",".join(repr(float(v)) for v in row) + "\n")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(buf.getvalue())


def uniform_grid(n: int, sample_rate: float) -> np.ndarray:
    """Canonical uniform time grid: k / sample_rate for k in [0, n)."""
    return np.arange(n, dtype=float) / sample_rate


def resample_uniform(rec: PenRecording, target_hz: float | None = None) -> PenRecording:
    """Linearly interpolate all channels onto the canonical uniform grid.

    The output has floor(duration * rate) + 1 samples, so duration is
    preserved to within one sample period. An input already on the canonical
    grid passes through with values unchanged (same grid, interpolation is
    the identity there).
    """
    rate = float(target_hz if target_hz is not None else rec.sample_rate)
    if rate <= 0:
        raise MalformedInput(f"target rate must be positive, got {rate}")
    duration = rec.duration
    n_out = int(np.floor(duration * rate + 1e-9)) + 1
    if n_out < MIN_SAMPLES:
        raise TooShort(
            f"resampling to {rate} Hz yields {n_out} samples; need {MIN_SAMPLES}")
    grid = uniform_grid(n_out, rate)
    old_t = rec.timestamps
    def interp(col):
        return np.interp(grid, old_t, col)
    accel = np.column_stack([interp(rec.accel[:, k]) for k in range(3)])
    gyro = np.column_stack([interp(rec.gyro[:, k]) for k in range(3)])
    force = interp(rec.force)
    out = replace(rec, timestamps=grid, accel=accel, gyro=gyro,
                  force=np.maximum(force, 0.0), sample_rate=rate)
    return validate(out)
