"""Gesture indicators: pen inclination, grip force, movement smoothness.

Inclination comes from a complementary filter that tracks the world-up
direction in the pen body frame, blending integrated gyroscope rotation
(accurate short-term) with the normalized accelerometer vector (unbiased
long-term gravity reference). Tilt is reported as the pen elevation angle:
90 degrees with the pen vertical, 0 with the pen flat on the table.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.signal import find_peaks

from .errors import DegenerateTilt
from .recording import PenRecording
from .segmentation import StrokeSegmentation, temporal_indicators

_FREEFALL_ACCEL = 0.5  # m/s^2; below this the accelerometer says nothing about up


@dataclass
class TiltSeries:
    """Per-sample pen elevation in degrees, one value per recording sample."""

    tilt_deg: np.ndarray
    sample_rate: float


def _rodrigues(v: np.ndarray, rotvec: np.ndarray) -> np.ndarray:
    """Rotate vector v by the rotation vector (axis * angle, radians)."""
    angle = float(np.linalg.norm(rotvec))
    if angle < 1e-15:
        return v
    axis = rotvec / angle
    c, s = np.cos(angle), np.sin(angle)
    return v * c + np.cross(axis, v) * s + axis * np.dot(axis, v) * (1.0 - c)


def estimate_tilt(rec: PenRecording, alpha: float = 0.98) -> TiltSeries:
    """Complementary-filter estimate of pen elevation for every sample.

    State is the unit world-up vector expressed in the body frame. Each step
    rotates the state against the gyroscope increment, then pulls it toward
    the normalized accelerometer direction with weight (1 - alpha). Samples
    in free fall (|accel| ~ 0) use the gyroscope prediction alone.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    n = rec.n_samples
    gyro_rad = np.deg2rad(rec.gyro)
    tilt = np.empty(n)

    a0 = rec.accel[0]
    norm0 = np.linalg.norm(a0)
    up = a0 / norm0 if norm0 > _FREEFALL_ACCEL else np.array([0.0, 0.0, 1.0])

    def elevation(u: np.ndarray) -> float:
        zenith = np.degrees(np.arccos(np.clip(u[2], -1.0, 1.0)))
        return abs(90.0 - zenith)

    tilt[0] = elevation(up)
    for i in range(1, n):
        dt = rec.timestamps[i] - rec.timestamps[i - 1]
        # a world-fixed vector seen from a body rotating at w moves at -w x u
        up = _rodrigues(up, -gyro_rad[i] * dt)
        a = rec.accel[i]
        norm = np.linalg.norm(a)
        if norm > _FREEFALL_ACCEL:
            blended = alpha * up + (1.0 - alpha) * (a / norm)
            bn = np.linalg.norm(blended)
            if bn > 1e-12:
                up = blended / bn
        tilt[i] = elevation(up)
    return TiltSeries(tilt_deg=tilt, sample_rate=rec.sample_rate)


def tilt_stats(tilt: np.ndarray) -> tuple[float, float, float]:
    """(mean, cv, variance) of a tilt series, population variance.

    cv = std / mean; a zero mean makes cv undefined, reported as NaN with a
    DegenerateTilt warning.
    """
    tilt = np.asarray(tilt, dtype=float)
    if tilt.size == 0:
        raise ValueError("empty tilt series")
    mean = float(np.mean(tilt))
    var = float(np.var(tilt))
    if mean == 0.0:
        warnings.warn("tilt mean is zero; cv reported as missing", DegenerateTilt)
        cv = float("nan")
    else:
        cv = float(np.sqrt(var) / mean)
    return mean, cv, var


def count_extrema(x: np.ndarray, prominence: float) -> int:
    """Local maxima plus local minima with at least the given prominence,
    floored at 1 so featureless tracts still count one extremum."""
    x = np.asarray(x, dtype=float)
    n_max = len(find_peaks(x, prominence=prominence)[0])
    n_min = len(find_peaks(-x, prominence=prominence)[0])
    return max(1, n_max + n_min)


def force_indicators(rec: PenRecording, seg: StrokeSegmentation,
                     prominence: float = 0.05) -> tuple[float, float]:
    """(force, ncf): mean tip force over in-stroke samples, and the mean
    per-stroke count of prominent force extrema (pressure adjustments)."""
    in_stroke = np.concatenate([rec.force[s:e] for s, e in seg.strokes])
    force = float(np.mean(in_stroke))
    counts = [count_extrema(rec.force[s:e], prominence) for s, e in seg.strokes]
    return force, float(np.mean(counts))


def smoothness_indicator(rec: PenRecording, seg: StrokeSegmentation,
                         prominence: float = 0.2) -> float:
    """nca: mean per-stroke count of prominent acceleration-magnitude
    extrema; fewer direction changes means smoother movement."""
    mag = np.linalg.norm(rec.accel, axis=1)
    counts = [count_extrema(mag[s:e], prominence) for s, e in seg.strokes]
    return float(np.mean(counts))


@dataclass
class GestureFeatures:
    """The nine gesture indicators for one recording."""

    on_sheet: float
    in_air: float
    air_sheet_ratio: float
    tilt_mean: float
    tilt_cv: float
    tilt_var: float
    force: float
    ncf: float
    nca: float


def gesture_features(rec: PenRecording, seg: StrokeSegmentation, *,
                     tilt_alpha: float = 0.98, force_prominence: float = 0.05,
                     accel_prominence: float = 0.2) -> GestureFeatures:
    """All gesture indicators. Tilt statistics cover the writing span with
    pause samples excluded."""
    on_sheet, in_air, ratio = temporal_indicators(seg)
    series = estimate_tilt(rec, alpha=tilt_alpha)
    mask = seg.writing_mask()
    t_mean, t_cv, t_var = tilt_stats(series.tilt_deg[mask])
    force, ncf = force_indicators(rec, seg, prominence=force_prominence)
    nca = smoothness_indicator(rec, seg, prominence=accel_prominence)
    return GestureFeatures(on_sheet=on_sheet, in_air=in_air,
                           air_sheet_ratio=ratio, tilt_mean=t_mean,
                           tilt_cv=t_cv, tilt_var=t_var, force=force,
                           ncf=ncf, nca=nca)
