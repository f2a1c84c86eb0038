"""Exception hierarchy shared across the package."""


class LutPackError(Exception):
    """Base class for all errors raised by lutpack."""


class AddressError(LutPackError):
    """An input address is outside the table's domain."""


class UsageError(LutPackError):
    """Caller supplied inconsistent or malformed arguments."""


class FormatError(LutPackError):
    """A text file (table, mask, observations, plan) failed to parse."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class BoundsError(LutPackError):
    """An exhaustive routine was asked to run outside its enforced bounds."""


class InvariantError(LutPackError):
    """Internal consistency failure; indicates a bug, not bad input."""
