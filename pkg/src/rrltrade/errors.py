"""Exception hierarchy shared across the package.

Each subclass maps to one CLI exit code so shell callers can branch on
failure class without parsing stderr.
"""
from __future__ import annotations


class RrltradeError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class ConfigError(RrltradeError):
    """Malformed or inconsistent run configuration."""

    exit_code = 2


class DataError(RrltradeError):
    """Unusable input data: missing files, bad columns, short series."""

    exit_code = 3


class NumericalError(RrltradeError):
    """Non-finite values or degenerate numerics encountered mid-run."""

    exit_code = 4
