"""Exception hierarchy shared by the engine, strategies, solver and CLI."""

from __future__ import annotations


class FastGamesError(Exception):
    """Base class for all package errors."""


class InvalidConfig(FastGamesError):
    pass


class InvalidHandicap(FastGamesError):
    pass


class IllegalStep(FastGamesError):
    pass


class CorruptTranscript(FastGamesError):
    pass


class OutOfValidity(FastGamesError):
    """Raised when n is below the validity floor of a closed-form bound."""


class DegreeConditionViolated(FastGamesError):
    pass


class LimitExceeded(FastGamesError):
    pass


class StrategyFailure(FastGamesError):
    """A strategy could not produce an edge its rules mandate.

    ``transcript`` is attached by :func:`fastgames.engine.play` so that the
    partial game can be inspected or written to disk.
    """

    def __init__(self, message: str, *, transcript=None):
        super().__init__(message)
        self.transcript = transcript
