"""
Exception hierarchy for bflyflow.

Every error raised by the library derives from BmoError. Each subclass
carries the process exit code the `bmo` management command reports for it.
"""


class BmoError(Exception):
    """Base class for all bflyflow errors."""
    exit_code = 1


class InvalidParamsError(BmoError):
    """Raised when BmoParams or a placement policy violates its invariants."""
    exit_code = 3


class NonFiniteFitnessError(BmoError):
    """Raised when a landscape yields NaN or infinite fitness (a broken landscape)."""
    exit_code = 5
