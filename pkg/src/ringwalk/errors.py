"""Exception types shared across the package."""


class RingwalkError(Exception):
    """Base class for all package errors."""


class ConfigurationError(RingwalkError):
    """A model or run was configured with invalid parameters."""


class DimensionMismatchError(RingwalkError):
    """Operands have incompatible dimensions."""


class DomainError(RingwalkError):
    """An argument lies outside the domain of the requested operation."""


class FitWindowError(RingwalkError):
    """No usable fit window could be selected from a series."""


class NumericsError(RingwalkError):
    """A numerical routine failed or produced an invalid result."""


class QuenchSampleError(RingwalkError):
    """A sample inside a quench average failed."""

    def __init__(self, sample_index: int, message: str):
        super().__init__(f"sample {sample_index}: {message}")
        self.sample_index = sample_index
