"""Exception types raised across the package."""


class EepnLabError(Exception):
    """Base class for all errors raised by eepn_lab."""


class InvalidArgument(EepnLabError, ValueError):
    pass


class OutOfRange(EepnLabError, IndexError):
    pass


class NumericError(EepnLabError, ArithmeticError):
    pass


class FormatError(EepnLabError, ValueError):
    """Malformed input file. ``lineno`` is 1-based, or None for whole-file problems."""

    def __init__(self, message: str, lineno: int | None = None) -> None:
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class ConfigError(EepnLabError, ValueError):
    def __init__(self, field: str, message: str) -> None:
        self.field = field
        super().__init__(f"config field '{field}': {message}")
