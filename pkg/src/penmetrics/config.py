"""Run configuration: one flat key=value file plus command-line overrides.

Every key has a documented default equal to the owning module's default.
Unknown keys are rejected so typos cannot silently fall back.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields

from .errors import ConfigInvalid

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


@dataclass
class RunConfig:
    """Effective configuration of a pipeline run."""

    seed: int = 1234
    jobs: int = 1
    # ingest / segmentation
    sample_rate: float = 50.0
    force_threshold: float = 0.05
    min_stroke: float = 0.04
    pause_cutoff: float = 2.0
    # gesture indicators
    tilt_alpha: float = 0.98
    force_prominence: float = 0.05
    accel_prominence: float = 0.2
    # tremor indicators
    tremor_window: int = 500
    emd_max_imfs: int = 10
    emd_sift_tol: float = 0.2
    apen_m: int = 2
    apen_r_factor: float = 0.2
    rqa_dim: int = 3
    rqa_delay: int = 2
    rqa_eps_factor: float = 0.5
    rqa_l_min: int = 2
    # training
    gbdt_max_rounds: int = 500
    gbdt_early_stopping_rounds: int = 20
    gbdt_depth: int = 4
    gbdt_learning_rate: float = 0.1
    gbdt_l2_leaf: float = 3.0
    gbdt_inner_val_fraction: float = 0.2
    logreg_l2: float = 1.0
    logreg_tol: float = 1e-6
    logreg_max_iters: int = 10000
    fold_safe_scaling: bool = False
    # explanation
    explain_n_permutations: int = 2000
    explain_max_exact_features: int = 15
    # synthetic cohort
    synth_subjects_per_group: int = 20
    synth_samples_text: int = 3000
    synth_samples_list: int = 2100
    synth_gap_scale: float = 1.0


_POSITIVE = {
    "jobs", "sample_rate", "force_threshold", "min_stroke", "pause_cutoff",
    "force_prominence", "accel_prominence", "tremor_window", "emd_max_imfs",
    "emd_sift_tol", "apen_m", "apen_r_factor", "rqa_dim", "rqa_delay",
    "rqa_eps_factor", "rqa_l_min", "gbdt_max_rounds",
    "gbdt_early_stopping_rounds", "gbdt_depth", "gbdt_learning_rate",
    "gbdt_l2_leaf", "logreg_tol", "logreg_max_iters",
    "explain_n_permutations", "explain_max_exact_features",
    "synth_subjects_per_group", "synth_samples_text", "synth_samples_list",
}
_NON_NEGATIVE = {"seed", "tilt_alpha", "logreg_l2", "synth_gap_scale"}
_FRACTION = {"tilt_alpha", "gbdt_inner_val_fraction"}


def _parse_value(key: str, text: str, target_type: type):
    text = text.strip()
    try:
        if target_type is bool:
            low = text.lower()
            if low in _TRUE:
                return True
            if low in _FALSE:
                return False
            raise ValueError(f"not a boolean: {text!r}")
        if target_type is int:
            return int(text)
        if target_type is float:
            return float(text)
        return text
    except ValueError as exc:
        raise ConfigInvalid(f"bad value for {key}: {exc}") from None


def _validate(cfg: RunConfig) -> RunConfig:
    for f in fields(RunConfig):
        value = getattr(cfg, f.name)
        if f.name in _POSITIVE and not value > 0:
            raise ConfigInvalid(f"{f.name} must be positive, got {value}")
        if f.name in _NON_NEGATIVE and not value >= 0:
            raise ConfigInvalid(f"{f.name} must be >= 0, got {value}")
        if f.name in _FRACTION and not 0 < value <= 1:
            raise ConfigInvalid(f"{f.name} must be in (0, 1], got {value}")
    if cfg.gbdt_inner_val_fraction >= 1.0:
        raise ConfigInvalid("gbdt_inner_val_fraction must be below 1")
    return cfg


def apply_overrides(cfg: RunConfig, overrides: dict[str, str]) -> RunConfig:
    """Set keys from text values with type checking; unknown keys rejected."""
    known = {f.name: f.type for f in fields(RunConfig)}
    types = {f.name: type(getattr(cfg, f.name)) for f in fields(RunConfig)}
    for key, text in overrides.items():
        if key not in known:
            raise ConfigInvalid(
                f"unknown config key {key!r}; valid keys: "
                + ", ".join(sorted(known)))
        setattr(cfg, key, _parse_value(key, text, types[key]))
    return _validate(cfg)


def load_config(path: str | None, overrides: dict[str, str] | None = None,
                ) -> RunConfig:
    """Defaults, then file values, then explicit overrides."""
    cfg = RunConfig()
    file_pairs: dict[str, str] = {}
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                lines = fh.readlines()
        except OSError as exc:
            raise ConfigInvalid(f"cannot read config file: {exc}") from None
        for lineno, raw in enumerate(lines, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigInvalid(
                    f"{path}:{lineno}: expected key = value, got {raw.rstrip()!r}")
            key, _, value = line.partition("=")
            file_pairs[key.strip()] = value.strip()
    apply_overrides(cfg, file_pairs)
    if overrides:
        apply_overrides(cfg, overrides)
    return cfg


def config_lines(cfg: RunConfig) -> str:
    """Canonical key = value dump (sorted keys), also used by run.json."""
    pairs = asdict(cfg)
    return "\n".join(f"{k} = {pairs[k]}" for k in sorted(pairs)) + "\n"
