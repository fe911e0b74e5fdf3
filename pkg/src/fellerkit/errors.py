"""Shared exception types."""

from __future__ import annotations


class ConfigError(ValueError):
    """Invalid configuration or precondition violation detected before numerics run."""


class NumericalError(RuntimeError):
    """A numerical routine failed to meet its accuracy contract.

    Carries the achieved error estimate so callers can report how far the
    computation got.
    """

    def __init__(self, message: str, error_estimate: float | None = None):
        super().__init__(message)
        self.error_estimate = error_estimate
