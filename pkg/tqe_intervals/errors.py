"""Exception hierarchy shared by the services and the command line."""

from __future__ import annotations

from typing import Optional


class TQEError(ValueError):
    """Base class for every input or domain problem raised by this package."""


class DomainError(TQEError):
    """An argument lies outside the mathematical domain of an operation."""


class InsufficientDataError(TQEError):
    """Too few observations for the requested statistic."""


class UnsupportedAlphaError(DomainError):
    """The requested alpha has no entry in the normal-row k table."""


class DegenerateChanceError(DomainError):
    """Chance agreement is total, so kappa is undefined."""


class NoHistoryError(InsufficientDataError):
    """A single score cannot be evaluated without a prior average."""


class InvalidScenarioError(TQEError):
    """A simulation scenario violates its invariants."""


class InputFileError(TQEError):
    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None) -> None:
        self.path = path
        self.line = line
        where = ""
        if path:
            where = f"{path}:{line}: " if line is not None else f"{path}: "
        elif line is not None:
            where = f"line {line}: "
        super().__init__(f"{where}{message}")


class NumericalFailure(ArithmeticError):
    """An iterative routine hit its cap without converging."""


__all__ = [
    "TQEError",
    "DomainError",
    "InsufficientDataError",
    "UnsupportedAlphaError",
    "DegenerateChanceError",
    "NoHistoryError",
    "InvalidScenarioError",
    "InputFileError",
    "NumericalFailure",
]
