class DomainError(ValueError):
    """Raised when an argument violates a documented precondition."""


class SweepRangeError(RuntimeError):
    """Raised when a threshold sweep sees no sign change over its range.

    The message suggests how to widen the range.
    """
