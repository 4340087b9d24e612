"""Exception types shared across the package."""


class NavsegError(Exception):
    """Base class for every error raised by navseg."""


class ContractViolation(NavsegError):
    """An operation was called with arguments that violate its preconditions."""


class DecodeError(NavsegError):
    """Input bytes could not be decoded under the declared encoding."""

    def __init__(self, message: str, offset: int | None = None):
        super().__init__(message)
        self.offset = offset


class CorpusValidationError(NavsegError):
    """A corpus directory, manifest, or label file failed validation."""


class ModelSchemaError(NavsegError):
    """A model file is malformed; the message names the offending field."""


class TrainingError(NavsegError):
    """Classifier training could not proceed (degenerate labels, no convergence)."""
