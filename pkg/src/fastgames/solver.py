"""Exact minimax values of tiny Maker-Breaker games.

A game is a ground set of elements (board edges) and a list of winning sets.
States are (Maker mask, Breaker mask, player to move, steps left in the
move); the value is the number of Maker moves still needed, counting the
current one when Maker is mid-move. Maker stops the moment she wins.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .engine import Board, Edge, Family, Player, norm
from .errors import InvalidConfig, LimitExceeded
from .winset import BREAKER_WIN, TauValue, adjacency, contains, min_winning_edges

INF = float("inf")


@dataclass(frozen=True)
class SolveLimits:
    max_edges: int = 16
    max_states: int = 2_000_000


@dataclass
class ToyGame:
    """A positional game on elements 0..m-1 given by its winning sets."""

    size: int
    winning: list[int]
    labels: list[Edge] | None = None
    maker: int = 0
    breaker: int = 0

    @classmethod
    def from_sets(cls, size: int, sets: list[set[int]] | list[list[int]], maker=(), breaker=()) -> ToyGame:
        masks = sorted({sum(1 << x for x in s) for s in sets})
        return cls(size, masks, None, sum(1 << x for x in maker), sum(1 << x for x in breaker))


def board_edges(board: Board) -> list[Edge]:
    n = board.n
    return [(u, v) for u in range(n) for v in range(u + 1, n) if board.is_edge(u, v)]


def winning_sets(board: Board, family: Family) -> list[int]:
    """Edge masks of all minimum-size winning graphs on the board."""
    edges = board_edges(board)
    n = board.n
    kind = family.kind.value
    k = family.k
    if kind in ("pkf", "skf") and (k is None or n % k):
        return []
    if kind == "pm" and n % 2:
        n_eff = n - 1
    else:
        n_eff = n
    size = min_winning_edges(kind, n_eff, k)
    out = []
    for combo in itertools.combinations(range(len(edges)), size):
        adj = adjacency(n, [edges[i] for i in combo])
        if kind == "pm" and n % 2:
            # a matching covering all but one vertex
            if sum(1 for s in adj if s) == n_eff and all(len(s) <= 1 for s in adj):
                out.append(sum(1 << i for i in combo))
            continue
        if contains(family, adj):
            out.append(sum(1 << i for i in combo))
    return out


def game_from_board(board: Board, family: Family, limits: SolveLimits = SolveLimits()) -> ToyGame:
    edges = board_edges(board)
    if len(edges) > limits.max_edges:
        raise LimitExceeded(f"board has {len(edges)} edges; limit is {limits.max_edges}")
    index = {e: i for i, e in enumerate(edges)}
    maker = sum(1 << index[e] for e, s in board.owner.items() if s == 0)
    breaker = sum(1 << index[e] for e, s in board.owner.items() if s == 1)
    return ToyGame(len(edges), winning_sets(board, family), edges, maker, breaker)


def _perms_kn(n: int, edges: list[Edge]) -> list[list[int]]:
    index = {e: i for i, e in enumerate(edges)}
    out = []
    for p in itertools.permutations(range(n)):
        out.append([index[norm(p[u], p[v])] for u, v in edges])
    return out


@dataclass
class Solver:
    """Memoized minimax with lower-bound cut-offs."""

    game: ToyGame
    a: int
    b: int
    limits: SolveLimits = field(default_factory=SolveLimits)
    canonical: bool = False
    n: int | None = None
    table: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.a < 1 or self.b < 1:
            raise InvalidConfig("biases must be positive")
        if self.game.size > self.limits.max_edges:
            raise LimitExceeded(f"{self.game.size} elements exceed the limit {self.limits.max_edges}")
        self.full = (1 << self.game.size) - 1
        self.perms = None
        if self.canonical:
            if self.n is None or self.n > 6 or self.game.labels is None:
                raise InvalidConfig("canonicalization needs a complete board with at most 6 vertices")
            self.perms = _perms_kn(self.n, self.game.labels)

    def _canon(self, mk: int, bk: int) -> tuple[int, int]:
        if self.perms is None:
            return mk, bk
        best = None
        size = self.game.size
        for p in self.perms:
            m2 = b2 = 0
            for i in range(size):
                bit = 1 << p[i]
                if mk >> i & 1:
                    m2 |= bit
                elif bk >> i & 1:
                    b2 |= bit
            key = (m2, b2)
            if best is None or key < best:
                best = key
        return best

    def need(self, mk: int, bk: int) -> int | None:
        """Fewest elements Maker still lacks in a winning set Breaker has not touched."""
        best = None
        for w in self.game.winning:
            if w & bk:
                continue
            c = bin(w & ~mk).count("1")
            if best is None or c < best:
                best = c
        return best

    def value(self, mk: int, bk: int, side: int, r: int) -> float:
        key = (*self._canon(mk, bk), side, r)
        hit = self.table.get(key)
        if hit is not None:
            return hit
        v = self._value(mk, bk, side, r)
        if len(self.table) >= self.limits.max_states:
            raise LimitExceeded(f"more than {self.limits.max_states} states")
        self.table[key] = v
        return v

    def lower(self, need: int, side: int, r: int) -> int:
        if side == 0:
            return 1 if need <= r else 1 + -(-(need - r) // self.a)
        return -(-need // self.a)

    def live(self, mk: int, bk: int) -> int:
        """Free elements lying in some winning set Breaker has not touched.

        Claiming anything else is a pass, and by monotonicity a pass never
        helps either player, so only live elements are searched.
        """
        out = 0
        for w in self.game.winning:
            if not w & bk:
                out |= w
        return out & ~mk

    def _value(self, mk: int, bk: int, side: int, r: int) -> float:
        need = self.need(mk, bk)
        if need is None:
            return INF
        if side == 0 and need <= r:
            return 1
        live = self.live(mk, bk)
        lb = self.lower(need, side, r)
        moves = [1 << i for i in range(self.game.size) if live >> i & 1]
        if side == 0:
            best = INF
            for bit in moves:
                v = self._after(mk | bit, bk, 0, r)
                if v < best:
                    best = v
                    if best <= lb:
                        break
            return best
        if not moves:
            return self.value(mk, bk, 0, self.a)
        worst = -1
        for bit in moves:
            v = self._after(mk, bk | bit, 1, r)
            if v > worst:
                worst = v
                if worst == INF:
                    break
        return worst

    def _after(self, mk: int, bk: int, side: int, r: int) -> float:
        """Value after one step by ``side``, counted from that side's move."""
        if side == 0:
            if self.need(mk, bk) == 0:
                return 1
            if r > 1 and (mk | bk) != self.full:
                return self.value(mk, bk, 0, r - 1)
            return 1 + self.value(mk, bk, 1, self.b)
        if r > 1 and (mk | bk) != self.full:
            return self.value(mk, bk, 1, r - 1)
        return self.value(mk, bk, 0, self.a)

    def solve(self, first: int) -> float:
        g = self.game
        return self.value(g.maker, g.breaker, first, self.a if first == 0 else self.b)

    def best_step(self, mk: int, bk: int, side: int, r: int) -> int:
        free = self.live(mk, bk) or self.full & ~(mk | bk)
        best_i, best_v = None, None
        for i in range(self.game.size):
            if not free >> i & 1:
                continue
            bit = 1 << i
            if side == 0:
                v = self._after(mk | bit, bk, 0, r)
                if best_v is None or v < best_v:
                    best_i, best_v = i, v
            else:
                v = self._after(mk, bk | bit, 1, r)
                if best_v is None or v > best_v:
                    best_i, best_v = i, v
        if best_i is None:
            raise InvalidConfig("no free element to move on")
        return best_i


def _to_tau(v: float) -> TauValue:
    return BREAKER_WIN if v == INF else TauValue(int(v))


def _side(first: Player | int | str) -> int:
    if isinstance(first, Player):
        return first.side
    if isinstance(first, str):
        return 0 if first.lower() in ("maker", "red") else 1
    return int(first)


def solve_game(game: ToyGame, a: int, b: int, first: Player | int | str = Player.BREAKER, limits: SolveLimits = SolveLimits()) -> TauValue:
    """tau of an explicit toy game."""
    return _to_tau(Solver(game, a, b, limits).solve(_side(first)))


def solve_tau(
    board: Board,
    family: Family | str,
    a: int,
    b: int | None = None,
    first: Player | int | str = Player.BREAKER,
    limits: SolveLimits = SolveLimits(),
    *,
    canonical: bool = False,
    k: int | None = None,
) -> TauValue:
    """Exact tau_F(a:b) on a tiny board, from its current position."""
    fam = family if isinstance(family, Family) else Family.parse(family, k)
    game = game_from_board(board, fam, limits)
    solver = Solver(game, a, a if b is None else b, limits, canonical and board.kind == "kn", board.n)
    return _to_tau(solver.solve(_side(first)))


def best_move(
    board: Board,
    family: Family | str,
    a: int,
    b: int | None = None,
    to_move: Player | int | str = Player.MAKER,
    limits: SolveLimits = SolveLimits(),
    *,
    k: int | None = None,
) -> list[Edge]:
    """A full move for ``to_move`` that keeps the solver value optimal."""
    fam = family if isinstance(family, Family) else Family.parse(family, k)
    game = game_from_board(board, fam, limits)
    b = a if b is None else b
    solver = Solver(game, a, b, limits)
    side = _side(to_move)
    mk, bk = game.maker, game.breaker
    r = a if side == 0 else b
    out: list[Edge] = []
    while r > 0 and (mk | bk) != solver.full:
        i = solver.best_step(mk, bk, side, r)
        out.append(game.labels[i])
        if side == 0:
            mk |= 1 << i
            if solver.need(mk, bk) == 0:
                break
        else:
            bk |= 1 << i
        r -= 1
    return out


__all__ = [
    "SolveLimits",
    "ToyGame",
    "Solver",
    "solve_game",
    "solve_tau",
    "best_move",
    "winning_sets",
]
