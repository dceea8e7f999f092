"""Fast winning strategies for fair Maker-Breaker games on graph edges.

The package holds a game engine, winning-set detectors, Maker strategies for
the perfect-matching, Hamilton-cycle, P_k-factor and S_k-factor games, a
small-board exact solver and a command-line front end.
"""

from __future__ import annotations

from .engine import Board, Family, GameConfig, GameKind, GameState, Mode, Player, Transcript, play, replay, verify
from .errors import (
    CorruptTranscript,
    DegreeConditionViolated,
    FastGamesError,
    IllegalStep,
    InvalidConfig,
    InvalidHandicap,
    LimitExceeded,
    OutOfValidity,
    StrategyFailure,
)
from .winset import TauValue, Tightness, round_bound

__version__ = "0.1.0"

__all__ = [
    "Board",
    "Family",
    "GameConfig",
    "GameKind",
    "GameState",
    "Mode",
    "Player",
    "Transcript",
    "play",
    "replay",
    "verify",
    "TauValue",
    "Tightness",
    "round_bound",
    "FastGamesError",
    "InvalidConfig",
    "InvalidHandicap",
    "IllegalStep",
    "CorruptTranscript",
    "OutOfValidity",
    "DegreeConditionViolated",
    "LimitExceeded",
    "StrategyFailure",
]
