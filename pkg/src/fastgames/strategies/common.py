from __future__ import annotations

import random
from dataclasses import dataclass, field

from ..engine import Board, Edge, GameState, Player, norm
from ..errors import StrategyFailure


@dataclass
class InvariantLog:
    """Pass/fail record per named checkpoint; never raises."""

    results: dict[str, bool] = field(default_factory=dict)
    failures: list[str] = field(default_factory=list)
    counts: dict[str, int] = field(default_factory=dict)

    def check(self, name: str, ok: bool, detail: str = "") -> bool:
        self.results[name] = self.results.get(name, True) and bool(ok)
        self.counts[name] = self.counts.get(name, 0) + 1
        if not ok and len(self.failures) < 50:
            self.failures.append(f"{name}: {detail}" if detail else name)
        return bool(ok)

    def report(self) -> dict[str, str]:
        return {k: "pass" if v else "fail" for k, v in self.results.items()}

    def merge(self, other: InvariantLog) -> None:
        for k, v in other.results.items():
            self.results[k] = self.results.get(k, True) and v
        self.failures.extend(other.failures)


class BaseStrategy:
    """Common plumbing: role, RNG and the invariant log."""

    name = "base"

    def __init__(self) -> None:
        self.log = InvariantLog()
        self.role: Player | None = None
        self.rng = random.Random(0)

    def start(self, state: GameState, role: Player, rng: random.Random) -> None:
        self.role = role
        self.rng = rng
        self.log = InvariantLog()
        self.setup(state)

    def setup(self, state: GameState) -> None:
        pass

    @property
    def side(self) -> int:
        return self.role.side

    def fail(self, msg: str) -> StrategyFailure:
        return StrategyFailure(f"{self.name}: {msg}")

    def last_opponent_move(self, state: GameState) -> list[Edge]:
        for rec in reversed(state.moves):
            if rec.player.side != self.side:
                return list(rec.edges)
            return []
        return []


def free_edge_filler(board: Board, exclude: set[Edge], count: int, prefer=None) -> list[Edge]:
    """Up to ``count`` free edges not in ``exclude``, lowest first."""
    out: list[Edge] = []
    if count <= 0:
        return out
    for e in board.free_edges():
        if e not in exclude:
            out.append(e)
            if len(out) == count:
                break
    return out


def claimable(board: Board, side: int, e: Edge) -> bool:
    """Free, or already owned by ``side``."""
    o = board.owner.get(norm(*e))
    return (o is None and board.is_edge(*e)) or o == side
