"""
Exception hierarchy for the elw-lab engine.

Each error carries the process exit code the CLI reports for it.
"""

from settings import EXIT_CONFIG_ERROR, EXIT_NUMERICAL_ERROR


class ElwError(Exception):
    """Base class for all engine errors."""

    exit_code = EXIT_NUMERICAL_ERROR


class ValidationError(ElwError, ValueError):
    """An input violates a type invariant (shape, unitarity, hermiticity...)."""


class SizingError(ValidationError):
    """A requested matrix would be too large to build."""


class PreconditionError(ElwError):
    """An operation was called outside its domain (e.g. without maximal entanglement)."""


class NumericalIntegrityError(ElwError):
    """A computed quantity drifted beyond tolerance (e.g. state norm)."""


class ConfigError(ElwError):
    """The experiment configuration is unreadable or inconsistent."""

    exit_code = EXIT_CONFIG_ERROR

    def __init__(self, message: str, path: str = None, line: int = None):
        self.path = path
        self.line = line
        location = ""
        if path is not None:
            location = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(f"{location}{message}")
