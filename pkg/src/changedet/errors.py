"""Exception taxonomy shared across the toolkit.

Three broad classes drive CLI exit codes: validation problems (bad
configs, bad arguments, bad specs), environment problems (missing
devices, unreachable weight hosts), and runtime failures (corrupt data,
diverged training, integrity violations).
"""


class ChangeDetError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(ChangeDetError):
    """User-supplied configuration or arguments are invalid."""


class ConfigError(ValidationError):
    """A config file or config object violates its schema."""

    def __init__(self, message, field=None):
        self.field = field
        if field:
            message = f"{field}: {message}"
        super().__init__(message)


class InvalidArgumentError(ValidationError):
    pass


class InvalidSpecError(ValidationError):
    """Backbone spec is not a row of the registry."""


class InvalidSplitError(ValidationError):
    """Requested split is not declared for the dataset."""


class EnvironmentUnavailableError(ChangeDetError):
    """A required device, host, or capability is not available."""


class WeightsUnavailableError(EnvironmentUnavailableError):
    """Pretrained weights are neither cached nor fetchable."""


class CapabilityError(EnvironmentUnavailableError):
    """An optional runtime capability (e.g. FLOP profiler) is missing."""


class RuntimeFailure(ChangeDetError):
    """Something went wrong while processing otherwise valid inputs."""


class DatasetNotFoundError(RuntimeFailure):
    pass


class CorruptSampleError(RuntimeFailure):
    def __init__(self, sample_id, message):
        self.sample_id = sample_id
        super().__init__(f"sample {sample_id!r}: {message}")


class ShapeError(RuntimeFailure):
    pass


class InvalidMaskError(RuntimeFailure):
    pass


class IntegrityError(RuntimeFailure):
    """Downloaded or converted weights failed verification."""


class TrainingDivergedError(RuntimeFailure):
    def __init__(self, epoch, message="non-finite training loss"):
        self.epoch = epoch
        super().__init__(f"{message} at epoch {epoch}")


class PrecisionError(RuntimeFailure):
    """Half-precision inference produced non-finite outputs."""


class IngestError(RuntimeFailure):
    pass


class NotFoundError(RuntimeFailure):
    pass
