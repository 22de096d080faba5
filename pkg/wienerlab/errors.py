"""Exception hierarchy shared by every wienerlab module.

Each error carries an ``exit_code`` and a ``detail`` message, so the command line
runner can map failures onto process status without inspecting types.
"""
from typing import Optional


class LabError(Exception):
    exit_code: int = 3

    def __init__(self, detail: str, *, path: Optional[str] = None):
        self.detail = detail
        self.path = path
        message = f"{path}: {detail}" if path else detail
        super().__init__(message)


class ConfigurationError(LabError):
    """Invalid grid, lattice, exponent or experiment configuration."""

    exit_code = 2


class UnsupportedDimensionError(ConfigurationError):
    pass


class ExponentError(ConfigurationError):
    pass


class UsageError(LabError):
    """An operation was handed a field on the wrong side or the wrong grid."""


class ShapeError(LabError):
    pass


class DomainError(LabError):
    """A point or a field leaves the computational domain."""

    def __init__(self, detail: str, *, measured: Optional[float] = None, path: Optional[str] = None):
        self.measured = measured
        if measured is not None:
            detail = f"{detail} (measured {measured:.3e})"
        super().__init__(detail, path=path)


class ResolutionError(LabError):
    pass


class ConstructionError(LabError):
    pass


class ZeroSequenceError(LabError):
    """Division by the norm of an all-zero coefficient sequence."""


class ReportWriteError(LabError):
    pass
