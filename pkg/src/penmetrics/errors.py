"""Exception and warning types shared across the pipeline."""


class PenmetricsError(Exception):
    """Base class for all errors raised by this package."""


class MalformedInput(PenmetricsError):
    """Input bytes/rows do not parse into the expected channel layout."""


class NonMonotonicTime(PenmetricsError):
    """Timestamps are not strictly increasing."""


class TooShort(PenmetricsError):
    """Recording has fewer samples than the minimum required."""


class NegativeForce(PenmetricsError):
    """Force channel contains negative values."""


class EmptyWriting(PenmetricsError):
    """No stroke found above the force threshold."""


class TooShortForTremor(PenmetricsError):
    """Not enough non-pause samples to fill one analysis window."""


class TooShortForRqa(PenmetricsError):
    """Window too short to embed with the requested dimension and delay."""


class SiftDiverged(PenmetricsError):
    """A sifting pass failed to converge within the iteration cap."""


class AllZeroSpectra(PenmetricsError):
    """Every window spectrum is identically zero; no modal frequency."""


class UnknownGroup(PenmetricsError):
    """Requested age group is absent from the feature table."""


class SingleClassInput(PenmetricsError):
    """Training labels contain only one class."""


class DimensionMismatch(PenmetricsError):
    """Feature matrix width does not match the model."""


class TooManyFeaturesForExact(PenmetricsError):
    """Exact Shapley enumeration requested above the feature-count cap."""


class ConfigInvalid(PenmetricsError):
    """Configuration file or override has an unknown key or a bad value."""


class MissingArtifact(PenmetricsError):
    """A pipeline stage needs an output that an earlier stage has not produced."""


class DegenerateTilt(UserWarning):
    """Tilt mean is zero, so the coefficient of variation is undefined."""


class MissingTask(UserWarning):
    """Subject lacks one of the two writing tasks and is dropped from the
    combined table."""
