"""Shared exception types."""


class ValidationError(ValueError):
    """An argument or model parameter violates a documented precondition."""


class BitFormatError(ValidationError):
    """Malformed bit-file input.  ``offset`` is the byte offset of the defect."""

    def __init__(self, message, offset):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class DegenerateSourceError(ValidationError):
    """The source puts zero mass on every string that normalizes to the requested length."""


class ConvergenceError(RuntimeError):
    """An iterative numerical routine failed to converge within its iteration cap."""
