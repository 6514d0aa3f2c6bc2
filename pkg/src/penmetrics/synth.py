"""Seeded synthetic cohort generator.

Produces pen recordings with controllable group-level writing behavior:
stroke and in-air gap durations, pause frequency, grip force level and
adjustment count, pen inclination and its wander, and a tremor component
mixing a tone with low-frequency-weighted broadband noise. Group parameter
tables encode monotone age trends (in-air time up, force down, tremor
amplitude and regularity up, tremor frequency down); the oldest transition
is dominated by a jump in in-air time. Everything is driven by named RNG
streams, so a cohort regenerates bit-identically from its manifest seeds.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace

import numpy as np
from scipy.signal import lfilter
from scipy.spatial.transform import Rotation

from .recording import AGE_GROUPS, TASKS, PenRecording, uniform_grid

GRAVITY = 9.81


@dataclass(frozen=True)
class GroupParams:
    """Generative writing-behavior parameters for one age group."""

    stroke_mean: float   # mean stroke duration, s
    stroke_sd: float
    gap_mean: float      # mean in-air gap duration, s
    gap_sd: float
    pause_rate: float    # probability a gap becomes a long pause
    force_level: float   # grip force plateau, N
    force_sd: float
    force_ripples: float  # pressure adjustments per stroke
    tilt_deg: float      # pen elevation, degrees
    tilt_jitter: float   # inclination wander, degrees
    tremor_hz: float     # dominant tremor frequency
    tremor_amp: float    # tremor acceleration amplitude, m/s^2
    tremor_regularity: float  # 1 = pure tone, 0 = broadband
    noise_floor: float   # sensor noise scale, m/s^2


DEFAULT_GROUPS: dict[str, GroupParams] = {
    "YY": GroupParams(stroke_mean=0.32, stroke_sd=0.05, gap_mean=0.28,
                      gap_sd=0.05, pause_rate=0.02, force_level=1.60,
                      force_sd=0.08, force_ripples=2.0, tilt_deg=55.0,
                      tilt_jitter=2.0, tremor_hz=9.0, tremor_amp=0.35,
                      tremor_regularity=0.40, noise_floor=0.020),
    "EY": GroupParams(stroke_mean=0.38, stroke_sd=0.06, gap_mean=0.40,
                      gap_sd=0.08, pause_rate=0.04, force_level=1.45,
                      force_sd=0.10, force_ripples=2.4, tilt_deg=50.0,
                      tilt_jitter=2.8, tremor_hz=8.0, tremor_amp=0.55,
                      tremor_regularity=0.52, noise_floor=0.025),
    "EF": GroupParams(stroke_mean=0.46, stroke_sd=0.08, gap_mean=0.55,
                      gap_sd=0.12, pause_rate=0.07, force_level=1.30,
                      force_sd=0.12, force_ripples=2.9, tilt_deg=45.0,
                      tilt_jitter=3.6, tremor_hz=7.0, tremor_amp=0.80,
                      tremor_regularity=0.66, noise_floor=0.030),
    "EE": GroupParams(stroke_mean=0.58, stroke_sd=0.11, gap_mean=0.95,
                      gap_sd=0.22, pause_rate=0.16, force_level=1.10,
                      force_sd=0.15, force_ripples=3.6, tilt_deg=38.0,
                      tilt_jitter=5.0, tremor_hz=5.5, tremor_amp=1.15,
                      tremor_regularity=0.85, noise_floor=0.035),
}


@dataclass
class CohortConfig:
    """Shape of a generated cohort."""

    subjects_per_group: int = 20
    samples_text: int = 3000
    samples_list: int = 2100
    sample_rate: float = 50.0
    seed: int = 1234
    gap_scale: float = 1.0
    groups: dict[str, GroupParams] | None = None  # None = DEFAULT_GROUPS


def scale_group_gaps(groups: dict[str, GroupParams],
                     gap_scale: float) -> dict[str, GroupParams]:
    """Shrink or stretch every parameter's spread across groups about its
    cross-group mean; 1.0 returns the table unchanged."""
    if gap_scale == 1.0:
        return dict(groups)
    names = [f.name for f in fields(GroupParams)]
    means = {nm: float(np.mean([getattr(g, nm) for g in groups.values()]))
             for nm in names}
    out = {}
    for key, g in groups.items():
        out[key] = GroupParams(**{
            nm: means[nm] + gap_scale * (getattr(g, nm) - means[nm])
            for nm in names})
    return out


@dataclass
class SubjectParams:
    """One subject's personal parameters, drawn around the group values."""

    group: GroupParams
    stroke_mean: float
    gap_mean: float
    pause_rate: float
    force_level: float
    force_ripples: float
    tilt_deg: float
    tilt_jitter: float
    tremor_hz: float
    tremor_amp: float
    tremor_regularity: float
    noise_floor: float
    tremor_dir: np.ndarray
    tremor_phase: float


def draw_subject(group: GroupParams, rng: np.random.Generator) -> SubjectParams:
    """Personal deviation from the group profile; in-air gaps get the
    tightest relative spread so they stay the cleanest group separator."""
    def rel(v, spread, lo):
        return max(lo, v * (1.0 + spread * rng.standard_normal()))

    eta = rng.uniform(0.0, 2.0 * np.pi)
    direction = np.array([0.45 * np.cos(eta), 0.45 * np.sin(eta), 1.0])
    return SubjectParams(
        group=group,
        stroke_mean=rel(group.stroke_mean, 0.10, 0.10),
        gap_mean=rel(group.gap_mean, 0.05, 0.08),
        pause_rate=min(0.5, rel(group.pause_rate, 0.25, 0.0)),
        force_level=rel(group.force_level, 0.10, 0.30),
        force_ripples=rel(group.force_ripples, 0.15, 1.0),
        tilt_deg=float(np.clip(group.tilt_deg * (1.0 + 0.12 * rng.standard_normal()),
                               15.0, 80.0)),
        tilt_jitter=rel(group.tilt_jitter, 0.20, 0.3),
        tremor_hz=float(np.clip(group.tremor_hz + 0.6 * rng.standard_normal(),
                                2.5, 11.5)),
        tremor_amp=rel(group.tremor_amp, 0.18, 0.02),
        tremor_regularity=float(np.clip(
            group.tremor_regularity + 0.08 * rng.standard_normal(), 0.05, 0.98)),
        noise_floor=rel(group.noise_floor, 0.15, 0.0),
        tremor_dir=direction / np.linalg.norm(direction),
        tremor_phase=rng.uniform(0.0, 2.0 * np.pi),
    )


def _task_adjusted(p: SubjectParams, task: str) -> SubjectParams:
    """List writing uses slightly shorter strokes and wider gaps."""
    if task == "List":
        return replace(p, stroke_mean=0.9 * p.stroke_mean,
                       gap_mean=1.1 * p.gap_mean)
    return p


def _smooth_noise(rng: np.random.Generator, n: int, cutoff_hz: float,
                  fs: float) -> np.ndarray:
    """Unit-variance low-pass noise (one-pole filter on white noise)."""
    a = float(np.exp(-2.0 * np.pi * cutoff_hz / fs))
    x = rng.standard_normal(n)
    y = lfilter([1.0 - a], [1.0, -a], x)
    sd = float(np.std(y))
    return y / sd if sd > 0 else y


def _band_noise(rng: np.random.Generator, n: int, lo_hz: float, hi_hz: float,
                fs: float) -> np.ndarray:
    """Unit-variance noise confined to [lo_hz, hi_hz] (difference of one-pole
    low-passes), used for the irregular share of tremor so it stays in the
    physiological band instead of drifting."""
    a_hi = float(np.exp(-2.0 * np.pi * hi_hz / fs))
    a_lo = float(np.exp(-2.0 * np.pi * lo_hz / fs))
    x = rng.standard_normal(n)
    wide = lfilter([1.0 - a_hi], [1.0, -a_hi], x)
    y = wide - lfilter([1.0 - a_lo], [1.0, -a_lo], wide)
    sd = float(np.std(y))
    return y / sd if sd > 0 else y


def _schedule(p: SubjectParams, n: int, fs: float,
              rng: np.random.Generator) -> list[tuple[str, int]]:
    """Alternating (kind, n_samples) segments: lead-in, strokes and gaps,
    trailing idle. Strokes are never truncated, so with zero noise the
    stroke count is exact."""
    g = p.group
    lead = int(round(0.4 * fs))
    trail = int(round(0.3 * fs))
    segments = [("idle", lead)]
    cursor = lead
    while True:
        stroke = int(round(np.clip(rng.normal(p.stroke_mean, g.stroke_sd),
                                   0.08, 2.5 * p.stroke_mean) * fs))
        stroke = max(stroke, 4)
        if cursor + stroke + trail > n:
            break
        segments.append(("stroke", stroke))
        cursor += stroke
        if rng.random() < p.pause_rate:
            gap = int(round(rng.uniform(2.4, 4.5) * fs))
        else:
            gap = int(round(np.clip(rng.normal(p.gap_mean, g.gap_sd),
                                    0.06, 1.8) * fs))
        gap = max(gap, 2)
        if cursor + gap + trail > n:
            break
        segments.append(("gap", gap))
        cursor += gap
    if not any(kind == "stroke" for kind, _ in segments):
        raise ValueError(f"{n} samples cannot fit one stroke plus margins")
    segments.append(("idle", n - cursor))
    return segments


def generate_subject(group: GroupParams, task: str, n_samples: int,
                     sample_rate: float, subject_seed: int, *,
                     subject_id: str = "", age_group: str = "unknown",
                     ) -> PenRecording:
    """Generate one recording bit-reproducibly from its seed.

    Subject-level parameters come from stream (subject_seed,), shared by
    both tasks; per-task signal noise comes from (subject_seed, task index).
    """
    if task not in TASKS:
        raise ValueError(f"task must be one of {TASKS}")
    params = _task_adjusted(
        draw_subject(group, np.random.default_rng([subject_seed])), task)
    rng = np.random.default_rng([subject_seed, TASKS.index(task)])
    fs = sample_rate
    n = int(n_samples)
    t = uniform_grid(n, fs)

    segments = _schedule(params, n, fs, rng)

    force = np.zeros(n)
    cursor = 0
    for kind, length in segments:
        if kind == "stroke":
            u = (np.arange(length) + 0.5) / length
            phase = rng.uniform(0.0, 2.0 * np.pi)
            profile = (0.35 + 0.65 * np.sin(np.pi * u)
                       + 0.12 * np.sin(2.0 * np.pi * params.force_ripples * u
                                       + phase))
            level = max(0.3, rng.normal(params.force_level,
                                        params.group.force_sd))
            force[cursor:cursor + length] = level * profile
        cursor += length
    if params.noise_floor > 0:
        force = force + rng.normal(0.0, 0.15 * params.noise_floor, n)
    force = np.maximum(force, 0.0)

    # orientation: slow wander of elevation, azimuth, and pen roll
    elev = np.clip(params.tilt_deg
                   + params.tilt_jitter * _smooth_noise(rng, n, 0.1, fs),
                   5.0, 85.0)
    azim = np.deg2rad(25.0) * _smooth_noise(rng, n, 0.05, fs)
    roll = np.deg2rad(15.0) * _smooth_noise(rng, n, 0.08, fs)
    rot = Rotation.from_euler(
        "ZYZ", np.column_stack([np.degrees(azim), 90.0 - elev,
                                np.degrees(roll)]), degrees=True)
    gravity_body = rot.inv().apply(np.array([0.0, 0.0, GRAVITY]))

    gyro = np.zeros((n, 3))
    delta = rot[:-1].inv() * rot[1:]
    gyro[1:] = np.degrees(delta.as_rotvec()) * fs  # deg/s over each step

    tone = np.sqrt(2.0) * np.sin(2.0 * np.pi * params.tremor_hz * t
                                 + params.tremor_phase)
    tone *= 1.0 + 0.15 * _smooth_noise(rng, n, 0.2, fs)
    rough = _band_noise(rng, n, 3.0, 12.0, fs)
    reg = params.tremor_regularity
    tremor = params.tremor_amp * (reg * tone + (1.0 - reg) * rough)
    accel = gravity_body + tremor[:, None] * params.tremor_dir[None, :]

    if params.noise_floor > 0:
        accel = accel + rng.normal(0.0, params.noise_floor, (n, 3))
        gyro = gyro + rng.normal(0.0, 5.0 * params.noise_floor, (n, 3))

    return PenRecording(timestamps=t, accel=accel, gyro=gyro, force=force,
                        sample_rate=fs, subject_id=subject_id, task=task,
                        age_group=age_group)


def generate_cohort(cfg: CohortConfig) -> tuple[list[PenRecording], list[dict]]:
    """Generate all (group x subject x task) recordings plus a manifest.

    The manifest rows carry everything needed to regenerate each recording
    bit-identically: subject id, group, task, per-subject seed, and sample
    count.
    """
    groups = scale_group_gaps(cfg.groups or DEFAULT_GROUPS, cfg.gap_scale)
    missing = [g for g in AGE_GROUPS if g not in groups]
    if missing:
        raise ValueError(f"group table lacks {missing}")
    master = np.random.default_rng(cfg.seed)
    recordings = []
    manifest = []
    for group_name in AGE_GROUPS:
        for k in range(cfg.subjects_per_group):
            subject_id = f"{group_name}{k:02d}"
            subject_seed = int(master.integers(0, 2**63))
            for task in TASKS:
                n = cfg.samples_text if task == "Text" else cfg.samples_list
                rec = generate_subject(groups[group_name], task, n,
                                       cfg.sample_rate, subject_seed,
                                       subject_id=subject_id,
                                       age_group=group_name)
                recordings.append(rec)
                manifest.append({"subject_id": subject_id,
                                 "age_group": group_name, "task": task,
                                 "seed": subject_seed, "n_samples": n})
    return recordings, manifest
