"""Exception hierarchy shared across the package."""

from __future__ import annotations


class TaskforgeError(Exception):
    """Base class for all package errors."""


class DomainError(TaskforgeError):
    """A symbolic-model contract was violated (unknown entity/class, bad typing)."""


class ConfigError(TaskforgeError):
    """Invalid configuration: degenerate weights, missing shapes/rules, bad CLI input."""


class SamplingError(TaskforgeError):
    """A weighted draw had no positive mass; callers may treat it as a resample trigger."""


class GenerationExhausted(TaskforgeError):
    """Sequence generation ran out of budget. Carries the trace for debugging."""

    def __init__(self, message: str, trace=None):
        super().__init__(message)
        self.trace = trace


class OracleCeilingError(TaskforgeError):
    """Exhaustive enumeration refused: the instance is too large. Carries the estimate."""

    def __init__(self, message: str, estimate: int):
        super().__init__(message)
        self.estimate = estimate


class ExportError(TaskforgeError):
    """Dataset sink failure. ``written`` counts records fully flushed before it."""

    def __init__(self, message: str, written: int):
        super().__init__(message)
        self.written = written


class DomainMismatchError(TaskforgeError):
    """Records from different domains were combined (similarity, matrices)."""


class SchemaVersionError(TaskforgeError):
    """Dataset schema version differs from what this tool version supports."""
