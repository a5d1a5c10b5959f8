"""Exception types shared across the regression suite."""


class EmptySampleSet(ValueError):
    """Tree fitting requires at least one sample."""


class TooFewSamples(ValueError):
    """Model fitting requires at least two samples."""


class KTooLarge(ValueError):
    """k exceeds the number of training samples."""


class DegenerateTarget(ValueError):
    """All target values are equal; R-squared is undefined."""


class DimensionMismatch(ValueError):
    """Input feature count differs from what the model was fit on."""


class NegativeSize(ValueError):
    """Burned area cannot be negative."""


class UnsupportedVersion(ValueError):
    """Model artifact schema version is not supported."""


class CorruptModel(ValueError):
    """Model artifact is truncated or structurally invalid."""
