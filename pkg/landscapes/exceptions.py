from bmo.exceptions import BmoError


class InvalidDomainError(BmoError):
    """Raised when domain bounds or a sphere radius are malformed."""
    exit_code = 3


class OutOfDomainError(BmoError):
    """Raised when a position lies outside the landscape domain beyond tolerance."""
    exit_code = 5


class UnsupportedLandscapeError(BmoError):
    """Raised when an operation does not apply to a landscape kind (e.g. grid oracle on a sphere)."""
    exit_code = 5


class PgmFormatError(BmoError):
    """Raised for malformed, truncated or non-grayscale PGM files."""
    exit_code = 5

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


class OracleError(BmoError):
    """Raised for grid oracle requests that cannot be answered (resolution too coarse)."""
    exit_code = 3
