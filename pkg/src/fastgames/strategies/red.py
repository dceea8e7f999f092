"""Red's first-player strategy for the strong (2:2) Hamilton-cycle game.

Red runs the weak-game Hamilton strategy until four paths remain, merges
them into two paths with no Blue edge between their endpoints, then closes
a Hamilton cycle within two more moves while blocking Blue's only threat.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from ..engine import Edge, GameState, norm
from ..errors import StrategyFailure
from ..graphtools import PathCollection, close_path
from .common import BaseStrategy, free_edge_filler
from .ham import HamStrategy, bad_degrees


@dataclass
class RedMemory:
    I2: set[int] = field(default_factory=set)
    B2: set[Edge] = field(default_factory=set)
    B3: set[Edge] = field(default_factory=set)
    P2: list[list[int]] = field(default_factory=list)
    P3: list[list[int]] = field(default_factory=list)
    stage2_case: str = ""
    stage3_case: str = ""
    e1: Edge | None = None
    e2: Edge | None = None
    hamilton_path: list[int] | None = None


def blue_components(n: int, edges: set[Edge]) -> list[list[int]]:
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    seen = [False] * n
    comps = []
    for s in range(n):
        if seen[s]:
            continue
        seen[s] = True
        stack, comp = [s], []
        while stack:
            v = stack.pop()
            comp.append(v)
            for w in adj[v]:
                if not seen[w]:
                    seen[w] = True
                    stack.append(w)
        comps.append(comp)
    return comps


def blue_is_two_paths(n: int, edges: set[Edge]) -> bool:
    """True when the graph is a forest of exactly two paths covering all vertices."""
    deg = [0] * n
    for u, v in edges:
        deg[u] += 1
        deg[v] += 1
    if max(deg, default=0) > 2:
        return False
    comps = blue_components(n, edges)
    # acyclic iff |E| = n - #components
    return len(comps) == 2 and len(edges) == n - 2


def completing_pairs(n: int, edges: set[Edge]) -> list[tuple[Edge, Edge]]:
    """Edge pairs that turn a spanning two-path forest into a Hamilton cycle."""
    if not blue_is_two_paths(n, edges):
        return []
    deg = [0] * n
    for u, v in edges:
        deg[u] += 1
        deg[v] += 1
    ends = []
    for comp in blue_components(n, edges):
        if len(comp) == 1:
            ends.append((comp[0], comp[0]))
        else:
            e = sorted(v for v in comp if deg[v] == 1)
            ends.append((e[0], e[1]))
    (s1, t1), (s2, t2) = ends
    pairs = {tuple(sorted((norm(s1, s2), norm(t1, t2)))), tuple(sorted((norm(s1, t2), norm(t1, s2))))}
    return sorted(p for p in pairs if p[0] != p[1] and all(u != v for u, v in p))


class RedStrategy(BaseStrategy):
    name = "red"

    def setup(self, state: GameState) -> None:
        cfg = state.config
        if cfg.bias(self.role) != 2 or cfg.bias(cfg.players[1]) != 2 or cfg.n % 2:
            raise StrategyFailure("red: needs a=b=2 and even n")
        self.board = state.board
        self.n = state.board.n
        self.opp = 1 - self.side
        # the weak-game strategy only drives Stage I; its checks are advisory
        self.ham = HamStrategy()
        self.ham.start(state, self.role, self.rng)
        self.mem = RedMemory()
        self.i = 0

    # helpers -----------------------------------------------------------------

    def blue_edges(self) -> set[Edge]:
        return set(self.board.edges(self.opp))

    def coll(self, extra: list[Edge] = ()) -> PathCollection:
        adj = [set(s) for s in self.board.adj[self.side]]
        for u, v in extra:
            adj[u].add(v)
            adj[v].add(u)
        return PathCollection.from_graph(self.n, adj)

    def bad_count(self, coll: PathCollection) -> int:
        return sum(bad_degrees(coll, self.board.adj[self.opp]).values()) // 2

    def good_edges(self, coll: PathCollection, pending=()) -> list[Edge]:
        end = coll.end
        out = []
        for u, w in combinations(sorted(end), 2):
            if end[u] != end[w] and self.board.is_free(u, w) and norm(u, w) not in pending:
                out.append(norm(u, w))
        return out

    # moves -------------------------------------------------------------------

    def next_move(self, state: GameState) -> list[Edge]:
        edges = self._move(state)
        return edges + free_edge_filler(self.board, set(edges), 2 - len(edges))

    def _move(self, state: GameState) -> list[Edge]:
        self.i += 1
        half = self.n // 2
        if self.i <= half - 2:
            self.ham.mem.i = self.i - 1
            return self.ham.next_move(state)
        if self.i == half - 1:
            return self.stage2()
        if self.i == half:
            return self.stage3()
        return self.finish()

    def stage2(self) -> list[Edge]:
        m = self.mem
        coll = self.coll()
        self.log.check("red.four_paths", len(coll) == 4, f"p={len(coll)}")
        m.B2 = self.blue_edges()
        m.P2 = coll.as_list()
        bd = self.board.adj[self.opp]
        m.I2 = {v for v in range(self.n) if not bd[v]}
        br = self.bad_count(coll)
        goods = self.good_edges(coll)
        bdeg = bad_degrees(coll, bd)
        D = {e: bdeg[e[0]] + bdeg[e[1]] for e in goods}
        if br <= 3:
            m.stage2_case = "1"
        elif any(d >= 3 for d in D.values()):
            m.stage2_case = "2"
        else:
            m.stage2_case = "3"
        need_i2 = bool(set(coll.endpoints()) & m.I2)
        if m.stage2_case == "3":
            first = [e for e in goods if D[e] == 2]
        else:
            top = max(D.values(), default=0)
            first = [e for e in goods if D[e] == top]
        pick = self._stage2_search(coll, first, need_i2)
        if pick is None:
            self.log.check("red.stage2_case", False, f"case {m.stage2_case}: no e1,e2 with (S1),(S2)")
            pick = self._stage2_search(coll, goods, need_i2)
        else:
            self.log.check("red.stage2_case", True)
        if pick is None:
            raise StrategyFailure("red: no Stage II move satisfies (S1) and (S2)")
        e1, e2 = pick
        m.e1, m.e2 = e1, e2
        after = self.coll([e1, e2])
        m.P3 = after.as_list()
        self.log.check("red.S1", len(after) == 2 and self.bad_count(after) == 0)
        touched = {*e1, *e2}
        self.log.check("red.S2", (not need_i2) or bool(touched & m.I2))
        return [e1, e2]

    def _stage2_search(self, coll: PathCollection, first: list[Edge], need_i2: bool) -> tuple[Edge, Edge] | None:
        I2 = self.mem.I2
        for e1 in first:
            c1 = coll.copy()
            c1.join(*e1)
            for e2 in self.good_edges(c1, {e1}):
                if need_i2 and not ({*e1, *e2} & I2):
                    continue
                c2 = c1.copy()
                c2.join(*e2)
                if len(c2) == 2 and self.bad_count(c2) == 0:
                    return e1, e2
        return None

    def stage3(self) -> list[Edge]:
        m = self.mem
        blue = self.blue_edges()
        m.B3 = blue
        coll = self.coll()
        P1, P2 = coll.as_list()
        # two good closing edges end the game at once
        x1, y1, x2, y2 = P1[0], P1[-1], P2[0], P2[-1]
        for pair in sorted([sorted([norm(x1, x2), norm(y1, y2)]), sorted([norm(x1, y2), norm(y1, x2)])]):
            if pair[0] != pair[1] and all(self.board.is_free(*e) for e in pair):
                m.stage3_case = "close"
                return list(pair)
        threats = completing_pairs(self.n, blue)
        if not threats:
            m.stage3_case = "1"
            edges = self.ham._merge_two(coll)
            self.mem.hamilton_path = self.ham.mem.hamilton_path
            return edges
        m.stage3_case = "2.1" if any(len(c) == 1 for c in blue_components(self.n, blue)) else "2.2"
        merge = self._merge_edge(coll)
        block = self._block(threats, {merge})
        if block is None:
            self.log.check("red.blocking", False, f"cannot hit all Blue threats {threats}")
            raise StrategyFailure("red: Blue threatens two disjoint closings")
        self.log.check("red.blocking", True)
        return [merge, block]

    def _merge_edge(self, coll: PathCollection) -> Edge:
        P1, P2 = coll.as_list()
        for u, w in sorted(norm(u, w) for u in {P1[0], P1[-1]} for w in {P2[0], P2[-1]}):
            if self.board.is_free(u, w):
                if u in (P1[0], P1[-1]):
                    a = P1 if P1[-1] == u else P1[::-1]
                    b = P2 if P2[0] == w else P2[::-1]
                else:
                    a = P2 if P2[-1] == u else P2[::-1]
                    b = P1 if P1[0] == w else P1[::-1]
                self.mem.hamilton_path = a + b
                return norm(u, w)
        raise StrategyFailure("red: no good edge merges the two paths")

    def _block(self, threats: list[tuple[Edge, Edge]], pending: set[Edge]) -> Edge | None:
        live = [t for t in threats if all(self.board.is_free(*e) and e not in pending for e in t)]
        if not live:
            return next((e for e in self.board.free_edges() if e not in pending), None)
        cands = sorted({e for t in live for e in t})
        for e in cands:
            if all(e in t for t in live):
                return e
        return None

    def finish(self) -> list[Edge]:
        path = self.mem.hamilton_path
        if path is None:
            raise StrategyFailure("red: no Hamilton path to close")
        try:
            edges = close_path(path, self.ham.G())
        except Exception as exc:
            raise StrategyFailure(f"red: closing failed: {exc}") from exc
        return [e for e in edges if self.board.owner.get(e) is None]
