"""Exception types shared across modules."""


class BiasRangeError(ValueError):
    """Bias voltage outside the varactor's allowed reverse-bias interval."""


class CalibrationError(ValueError):
    """Calibration targets cannot be met with positive inductances."""


class CoverageError(RuntimeError):
    """Codebook leaves too many phase bins empty to be usable."""


class ScenarioError(ValueError):
    """Inconsistent simulation scenario (e.g. non-overlapping passes)."""


class ConfigError(ValueError):
    """Invalid scenario configuration document."""

    def __init__(self, message: str, key: str | None = None):
        super().__init__(message)
        self.key = key
