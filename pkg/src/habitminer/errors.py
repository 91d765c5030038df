"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes: ConfigError -> 1, DataError -> 2,
InternalError -> 3.
"""


class HabitMinerError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(HabitMinerError):
    """Invalid configuration or usage (bad thresholds, unknown keys...)."""


class DataError(HabitMinerError):
    """Input data violates a documented precondition."""


class ParseError(DataError):
    """Malformed input line; carries the 1-based line number."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class SpecValidationError(ConfigError):
    """A declarative activity spec cannot be satisfied."""


class InternalError(HabitMinerError):
    """An internal invariant was violated; indicates a bug."""
