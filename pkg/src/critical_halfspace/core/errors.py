from __future__ import annotations

from typing import Any


class HalfspaceError(Exception):
    """Base class for every failure raised by the library."""


class DomainError(HalfspaceError, ValueError):
    """A point, value or parameter lies outside an operation's domain."""


class SingularityError(DomainError):
    """Evaluation requested within the guard radius of a singular point."""


class PreconditionError(HalfspaceError, ValueError):
    pass


class BracketError(HalfspaceError, ValueError):
    pass


class FitFailureError(HalfspaceError, RuntimeError):
    def __init__(self, message: str, best: Any = None) -> None:
        super().__init__(message)
        self.best = best  # best iterate reached before giving up


class SweepFailureError(HalfspaceError, RuntimeError):
    pass


class IntegrationError(HalfspaceError, RuntimeError):
    pass


class StudyError(HalfspaceError, RuntimeError):
    pass
