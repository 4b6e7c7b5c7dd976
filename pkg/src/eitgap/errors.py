"""Exception types with enough context to map onto CLI exit codes."""

from __future__ import annotations

__all__ = ["SimulationError", "ConfigError", "NumericalError", "ValidationError"]


class SimulationError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(SimulationError):
    """Malformed or inconsistent configuration; names the offending key."""

    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"config key '{key}': {message}")


class ValidationError(SimulationError):
    """A domain object violates one of its invariants."""


class NumericalError(SimulationError):
    """Non-finite values appeared during a computation.

    ``context`` identifies where (a frequency, a step index, a stage name).
    """

    def __init__(self, message: str, context: str = ""):
        self.context = context
        super().__init__(f"{message}" + (f" [{context}]" if context else ""))
