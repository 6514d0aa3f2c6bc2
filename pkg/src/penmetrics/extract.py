"""Per-recording feature extraction: the 14 handwriting indicators.

Composes resampling, stroke segmentation, gesture indicators, and tremor
indicators into one named vector per recording.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .gesture import gesture_features
from .recording import PenRecording, resample_uniform
from .segmentation import segment_strokes
from .tremor import tremor_features

FEATURE_NAMES = (
    "OnSheet", "InAir", "AirSheetR", "Tilt_Mean", "Tilt_CV", "Tilt_Var",
    "Force", "NCF", "NCA", "F_modal", "RMS", "ApEn", "RR", "DET",
)


@dataclass
class FeatureVector:
    """The 14 named indicators for one subject performing one task."""

    subject_id: str
    age_group: str
    task: str
    values: dict[str, float] = field(default_factory=dict)

    def as_array(self) -> np.ndarray:
        return np.array([self.values[name] for name in FEATURE_NAMES])


@dataclass
class ExtractionConfig:
    """Knobs for the extraction chain; defaults match the reference setup."""

    sample_rate: float = 50.0
    force_threshold: float = 0.05
    min_stroke: float = 0.04
    pause_cutoff: float = 2.0
    tilt_alpha: float = 0.98
    force_prominence: float = 0.05
    accel_prominence: float = 0.2
    tremor_window: int = 500
    emd_max_imfs: int = 10
    emd_sift_tol: float = 0.2
    apen_m: int = 2
    apen_r_factor: float = 0.2
    rqa_dim: int = 3
    rqa_delay: int = 2
    rqa_eps_factor: float = 0.5
    rqa_l_min: int = 2


def extract_features(rec: PenRecording,
                     cfg: ExtractionConfig | None = None) -> FeatureVector:
    """Run the full extraction chain on one recording.

    The recording is resampled onto the canonical uniform grid first; the
    propagated errors (no strokes, too short for a tremor window, diverged
    sifting) describe recordings the pipeline cannot summarize.
    """
    cfg = cfg or ExtractionConfig()
    rec = resample_uniform(rec, cfg.sample_rate)
    seg = segment_strokes(rec, force_threshold=cfg.force_threshold,
                          min_stroke=cfg.min_stroke,
                          pause_cutoff=cfg.pause_cutoff)
    g = gesture_features(rec, seg, tilt_alpha=cfg.tilt_alpha,
                         force_prominence=cfg.force_prominence,
                         accel_prominence=cfg.accel_prominence)
    t = tremor_features(rec, seg, window_len=cfg.tremor_window,
                        max_imfs=cfg.emd_max_imfs, sift_tol=cfg.emd_sift_tol,
                        apen_m=cfg.apen_m, apen_r_factor=cfg.apen_r_factor,
                        rqa_dim=cfg.rqa_dim, rqa_delay=cfg.rqa_delay,
                        rqa_eps_factor=cfg.rqa_eps_factor,
                        rqa_l_min=cfg.rqa_l_min)
    values = {
        "OnSheet": g.on_sheet,
        "InAir": g.in_air,
        "AirSheetR": g.air_sheet_ratio,
        "Tilt_Mean": g.tilt_mean,
        "Tilt_CV": g.tilt_cv,
        "Tilt_Var": g.tilt_var,
        "Force": g.force,
        "NCF": g.ncf,
        "NCA": g.nca,
        "F_modal": t.f_modal,
        "RMS": t.rms,
        "ApEn": t.apen,
        "RR": t.rr,
        "DET": t.det,
    }
    return FeatureVector(subject_id=rec.subject_id, age_group=rec.age_group,
                         task=rec.task, values=values)
