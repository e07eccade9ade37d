"""Exception types shared across the package."""


class TarpError(Exception):
    """Base class for all package errors."""


class IngestionError(TarpError):
    """Raised when input data cannot be accepted (non-finite, non-numeric, ragged)."""


class DimensionError(TarpError):
    """Raised on shape/length mismatches or insufficient sample size."""


class ParameterError(TarpError):
    """Raised when a tuning parameter is outside its valid range."""


class ReplicateError(TarpError):
    """A single ensemble replicate failed; carries the replicate index and seed."""

    def __init__(self, index: int, seed: int, cause: BaseException):
        self.index = index
        self.seed = seed
        self.cause = cause
        super().__init__(f"replicate {index} (seed {seed}) failed: {cause!r}")
