"""penmetrics: handwriting and tremor indicators from smart-pen recordings.

The package turns raw 8-channel pen recordings (timestamp, triaxial
acceleration, triaxial angular rate, tip force) into 14 per-recording
indicators covering stroke timing, pen attitude, force dynamics, movement
smoothness, and tremor spectra, then trains and explains binary age-group
classifiers on top of them.

Typical flow::

    from penmetrics import (load_recording, extract_features, build_tables,
                            make_task, loo_cv)

or drive everything from the CLI (``penmetrics synth|extract|dataset|
train-eval|explain|report``).
"""

__version__ = "0.1.0"

from .errors import (PenmetricsError, MalformedInput, NonMonotonicTime,
                     TooShort, NegativeForce, EmptyWriting, TooShortForTremor,
                     TooShortForRqa, SiftDiverged, AllZeroSpectra,
                     UnknownGroup, SingleClassInput, DimensionMismatch,
                     TooManyFeaturesForExact, ConfigInvalid, MissingArtifact,
                     DegenerateTilt, MissingTask)
from .recording import (AGE_GROUPS, TASKS, PenRecording, load_recording,
                        save_recording, resample_uniform, uniform_grid,
                        validate)
from .segmentation import StrokeSegmentation, segment_strokes, temporal_indicators
from .gesture import (TiltSeries, estimate_tilt, tilt_stats, force_indicators,
                      smoothness_indicator, gesture_features, GestureFeatures)
from .emd import emd, local_extrema
from .tremor import (TremorWindows, HhtSpectrum, TremorFeatures, make_windows,
                     hht_spectrum, modal_frequency, tremor_rms,
                     approximate_entropy, rqa, tremor_features)
from .extract import FEATURE_NAMES, ExtractionConfig, FeatureVector, extract_features
from .dataset import (TASK_PAIRS, TASK_NAMES, FeatureTable, TaskDataset,
                      build_tables, make_task, normalize_columns,
                      apply_normalization, denormalize_columns, impute_missing,
                      table_to_csv, table_from_csv)
from .models import (TrainConfig, GbdtModel, LogRegModel, train_gbdt,
                     train_logreg, logreg_nll_grad, predict_raw, predict_proba,
                     model_to_dict, model_from_dict)
from .evaluate import (ConfusionMatrix, EvalReport, confusion_from_predictions,
                       metrics_from_confusion, roc_auc, loo_cv, final_fit)
from .explain import (ShapReport, shapley_exact, shapley_sampled,
                      rank_features, beeswarm_rows)
from .synth import (GroupParams, CohortConfig, DEFAULT_GROUPS, scale_group_gaps,
                    generate_subject, generate_cohort)
from .config import RunConfig, load_config, apply_overrides
from . import kernels

__all__ = [
    "__version__",
    # errors
    "PenmetricsError", "MalformedInput", "NonMonotonicTime", "TooShort",
    "NegativeForce", "EmptyWriting", "TooShortForTremor", "TooShortForRqa",
    "SiftDiverged", "AllZeroSpectra", "UnknownGroup", "SingleClassInput",
    "DimensionMismatch", "TooManyFeaturesForExact", "ConfigInvalid",
    "MissingArtifact", "DegenerateTilt", "MissingTask",
    # recordings
    "AGE_GROUPS", "TASKS", "PenRecording", "load_recording", "save_recording",
    "resample_uniform", "uniform_grid", "validate",
    # segmentation
    "StrokeSegmentation", "segment_strokes", "temporal_indicators",
    # gesture
    "TiltSeries", "estimate_tilt", "tilt_stats", "force_indicators",
    "smoothness_indicator", "gesture_features", "GestureFeatures",
    # decomposition / tremor
    "emd", "local_extrema", "TremorWindows", "HhtSpectrum", "TremorFeatures",
    "make_windows", "hht_spectrum", "modal_frequency", "tremor_rms",
    "approximate_entropy", "rqa", "tremor_features",
    # extraction
    "FEATURE_NAMES", "ExtractionConfig", "FeatureVector", "extract_features",
    # datasets
    "TASK_PAIRS", "TASK_NAMES", "FeatureTable", "TaskDataset", "build_tables",
    "make_task", "normalize_columns", "apply_normalization",
    "denormalize_columns", "impute_missing", "table_to_csv", "table_from_csv",
    # models
    "TrainConfig", "GbdtModel", "LogRegModel", "train_gbdt", "train_logreg",
    "logreg_nll_grad", "predict_raw", "predict_proba", "model_to_dict",
    "model_from_dict",
    # evaluation
    "ConfusionMatrix", "EvalReport", "confusion_from_predictions",
    "metrics_from_confusion", "roc_auc", "loo_cv", "final_fit",
    # explanation
    "ShapReport", "shapley_exact", "shapley_sampled", "rank_features",
    "beeswarm_rows",
    # synthesis
    "GroupParams", "CohortConfig", "DEFAULT_GROUPS", "scale_group_gaps",
    "generate_subject", "generate_cohort",
    # configuration
    "RunConfig", "load_config", "apply_overrides",
    "kernels",
]
