"""Exception types shared across qnetopt."""

from __future__ import annotations


class QnetoptError(Exception):
    """Base class for all qnetopt errors."""


class NetworkError(QnetoptError, ValueError):
    """A network description is malformed (bad index, duplicate route, bad rate)."""


class ConfigError(QnetoptError, ValueError):
    """A run configuration or artifact set is unusable."""


class SolverError(QnetoptError, RuntimeError):
    """A numerical procedure failed to produce a trustworthy result."""
