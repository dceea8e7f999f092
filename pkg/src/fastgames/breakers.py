"""Opponent strategies used to stress the Maker-side strategies.

Each returns exactly ``bias`` distinct free edges, or every free edge when
fewer remain.
"""

from __future__ import annotations

from .engine import Board, Edge, GameKind, GameState, norm
from .errors import StrategyFailure
from .strategies.common import BaseStrategy


class _Picker:
    """Collects distinct free edges for one move."""

    def __init__(self, board: Board, count: int):
        self.board = board
        self.count = min(count, board.free_count)
        self.edges: list[Edge] = []
        self.taken: set[Edge] = set()

    @property
    def full(self) -> bool:
        return len(self.edges) >= self.count

    def ok(self, u: int, v: int) -> bool:
        e = norm(u, v)
        return self.board.is_free(u, v) and e not in self.taken

    def add(self, u: int, v: int) -> bool:
        if self.full or not self.ok(u, v):
            return False
        e = norm(u, v)
        self.edges.append(e)
        self.taken.add(e)
        return True

    def fill_random(self, rng) -> list[Edge]:
        while not self.full:
            e = self.board.random_free_edge(rng)
            if e is None:
                break
            if e in self.taken:
                if self.board.free_count - len(self.taken) <= 0:
                    break
                if self.board.free_count <= 4 * len(self.taken):
                    for f in self.board.free_edges():
                        if self.add(*f) and self.full:
                            break
                    break
                continue
            self.add(*e)
        return self.edges


class BreakerBase(BaseStrategy):
    def bias(self, state: GameState) -> int:
        return state.config.bias(self.role)

    def need(self, state: GameState) -> int:
        """Maker degree at which a vertex is satisfied for the game."""
        return 2 if state.config.family.kind is GameKind.HAM else 1

    @property
    def opp(self) -> int:
        return 1 - self.side


class RandomBreaker(BreakerBase):
    name = "random"

    def next_move(self, state: GameState) -> list[Edge]:
        return _Picker(state.board, self.bias(state)).fill_random(self.rng)


class FirstFreeStrategy(BreakerBase):
    """Claims the lexicographically smallest free edges. Works for either side."""

    name = "first"

    def next_move(self, state: GameState) -> list[Edge]:
        pick = _Picker(state.board, state.config.bias(self.role))
        for e in state.board.free_edges():
            if pick.full:
                break
            pick.add(*e)
        return pick.edges


class MaxDegreeBreaker(BreakerBase):
    """Concentrates on one unsatisfied vertex until Maker covers it."""

    name = "max_degree"

    def setup(self, state: GameState) -> None:
        self.target: int | None = None

    def _pick_target(self, state: GameState, pick: _Picker) -> int | None:
        b = state.board
        need = self.need(state)
        best = None
        for v in range(b.n):
            if b.deg(self.opp, v) >= need:
                continue
            key = (-b.deg(self.side, v), v)
            if best is None or key < best[0]:
                if any(pick.ok(v, w) for w in b.neighbours(v)):
                    best = (key, v)
        return None if best is None else best[1]

    def move_into(self, state: GameState, pick: _Picker) -> None:
        b = state.board
        need = self.need(state)
        while not pick.full:
            t = self.target
            if t is None or b.deg(self.opp, t) >= need or not any(pick.ok(t, w) for w in b.neighbours(t)):
                t = self.target = self._pick_target(state, pick)
            if t is None:
                break
            w = min((w for w in b.neighbours(t) if pick.ok(t, w)), key=lambda w: (b.deg(self.opp, w), w))
            pick.add(t, w)

    def next_move(self, state: GameState) -> list[Edge]:
        pick = _Picker(state.board, self.bias(state))
        self.move_into(state, pick)
        return pick.fill_random(self.rng)


class IsolateBlocker(BreakerBase):
    """Claims edges inside the set of vertices Maker has not touched."""

    name = "isolate_blocker"

    def next_move(self, state: GameState) -> list[Edge]:
        b = state.board
        pick = _Picker(b, self.bias(state))
        iso = [v for v in range(b.n) if b.deg(self.opp, v) == 0]
        while not pick.full and len(iso) >= 2:
            order = sorted(iso, key=lambda v: (-b.deg(self.side, v), v))
            done = False
            for u in order:
                for w in order:
                    if w != u and pick.ok(u, w):
                        pick.add(u, w)
                        done = True
                        break
                if done:
                    break
            if not done:
                break
        return pick.fill_random(self.rng)


def maker_components(board: Board, side: int) -> list[int]:
    """Component label of every vertex in ``side``'s graph."""
    n = board.n
    comp = [-1] * n
    adj = board.adj[side]
    c = 0
    for s in range(n):
        if comp[s] >= 0:
            continue
        comp[s] = c
        stack = [s]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if comp[w] < 0:
                    comp[w] = c
                    stack.append(w)
        c += 1
    return comp


class MatchingBlocker(BreakerBase):
    """Claims edges between endpoints of different Maker paths, as a matching."""

    name = "matching_blocker"

    def next_move(self, state: GameState) -> list[Edge]:
        b = state.board
        pick = _Picker(b, self.bias(state))
        comp = maker_components(b, self.opp)
        ends = [v for v in range(b.n) if b.deg(self.opp, v) <= 1]
        endset = set(ends)
        bad = {v: sum(1 for w in b.adj[self.side][v] if w in endset and comp[w] != comp[v]) for v in ends}
        while not pick.full:
            order = sorted(ends, key=lambda v: (bad[v], v))
            chosen = None
            for i, u in enumerate(order):
                for w in order[i + 1 :]:
                    if comp[w] != comp[u] and pick.ok(u, w):
                        chosen = (u, w)
                        break
                if chosen:
                    break
            if chosen is None:
                break
            pick.add(*chosen)
            bad[chosen[0]] += 1
            bad[chosen[1]] += 1
        return pick.fill_random(self.rng)


class HamDelayer(MaxDegreeBreaker):
    """Lower-bound Breaker for the (2:2) Hamilton game.

    When Maker's graph is two paths that could be closed next move, it
    claims the edges from one endpoint of the first path to both endpoints
    of the second.
    """

    name = "ham_delayer"

    def next_move(self, state: GameState) -> list[Edge]:
        from .graphtools import linear_forest_paths

        b = state.board
        pick = _Picker(b, self.bias(state))
        paths = linear_forest_paths(b.n, b.adj[self.opp])
        if paths is not None and len(paths) == 2:
            P1, P2 = paths
            ends2 = sorted({P2[0], P2[-1]})
            best = None
            for x in sorted({P1[0], P1[-1]}):
                free = [w for w in ends2 if b.is_free(x, w)]
                key = (-len(free), x)
                if best is None or key < best[0]:
                    best = (key, x, free)
            if best is not None:
                for w in best[2]:
                    pick.add(best[1], w)
        self.move_into(state, pick)
        return pick.fill_random(self.rng)


class Tolerant(BreakerBase):
    """Runs a Maker strategy for the second player, topping up with random edges.

    In the strong game the wrapped strategy meets an opponent that does not
    play like Breaker, so any failure or short move is filled in.
    """

    def __init__(self, inner: BaseStrategy):
        super().__init__()
        self.inner = inner
        self.name = inner.name
        self.failures = 0

    def setup(self, state: GameState) -> None:
        self.inner.start(state, self.role, self.rng)

    def next_move(self, state: GameState) -> list[Edge]:
        pick = _Picker(state.board, self.bias(state))
        try:
            wanted = self.inner.next_move(state)
        except StrategyFailure:
            self.failures += 1
            wanted = []
        for e in wanted:
            if pick.full:
                break
            pick.add(*e)
        return pick.fill_random(self.rng)


def ham_as_blue() -> Tolerant:
    from .strategies.ham import HamStrategy

    return Tolerant(HamStrategy(fast_finish=True))


BREAKERS = {
    "random": RandomBreaker,
    "max_degree": MaxDegreeBreaker,
    "isolate_blocker": IsolateBlocker,
    "matching_blocker": MatchingBlocker,
    "ham_delayer": HamDelayer,
    "endpoint_blocker": HamDelayer,
    "first": FirstFreeStrategy,
    "ham": ham_as_blue,
}


def make_breaker(name: str) -> BreakerBase:
    try:
        return BREAKERS[name]()
    except KeyError:
        raise ValueError(f"unknown breaker {name!r}; choose from {sorted(BREAKERS)}") from None
