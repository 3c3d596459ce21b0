from typing import Optional

from bmo.exceptions import BmoError


class ScenarioConfigError(BmoError):
    """Raised for malformed scenario configs; field is the JSON path of the offending value."""
    exit_code = 3

    def __init__(self, message: str, field: Optional[str] = None):
        super().__init__(f"{field}: {message}" if field else message)
        self.field = field


class OutputPathError(BmoError):
    """Raised when an output directory or file cannot be written."""
    exit_code = 4


class TraceFormatError(BmoError):
    """Raised when a trace CSV does not match the schema; row is 1-based (header is row 1)."""
    exit_code = 6

    def __init__(self, message: str, row: int, column: Optional[str] = None):
        where = f"row {row}" + (f", column {column}" if column else "")
        super().__init__(f"{message} ({where})")
        self.row = row
        self.column = column


class CommandUsageError(BmoError):
    """Raised for command-line usage errors: unknown flags, missing subcommands, bad values."""
    exit_code = 2
