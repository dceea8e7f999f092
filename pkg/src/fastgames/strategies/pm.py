"""Fast perfect-matching strategy.

``PmCore`` plays the matching game on a sub-board given by a vertex set and
an optional bipartition. It is reused by the Hamilton-cycle strategy (its
first stage) and by the star-factor strategy (its final stage).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import networkx as nx

from ..engine import Board, Edge, GameState, norm
from ..errors import StrategyFailure
from .common import BaseStrategy, InvariantLog


class PmStage(Enum):
    I = "I"
    II = "II"
    DONE = "done"


@dataclass
class PmMemory:
    vertices: list[int]
    X: set[int] | None
    Y: set[int] | None
    C: int
    a: int
    M: dict[int, int] = field(default_factory=dict)
    I: set[int] = field(default_factory=set)
    i: int = 0
    stage: PmStage = PmStage.I
    case: str = ""


class PmCore:
    def __init__(
        self,
        board: Board,
        vertices: list[int],
        a: int,
        *,
        sides: tuple[set[int], set[int]] | None = None,
        C: int = 0,
        log: InvariantLog | None = None,
        prefix: str = "pm",
        me: int = 0,
    ):
        self.board = board
        self.me = me
        self.vset = set(vertices)
        X, Y = sides if sides is not None else (None, None)
        self.mem = PmMemory(sorted(vertices), X, Y, C, a, I=set(vertices))
        self.h = len(vertices) // 2
        self.stage1_moves = max(math.ceil(self.h / a) - 1, 0)
        self.log = log if log is not None else InvariantLog()
        self.prefix = prefix

    # board helpers --------------------------------------------------------

    def allowed(self, u: int, v: int) -> bool:
        if u == v or u not in self.vset or v not in self.vset:
            return False
        X = self.mem.X
        if X is not None and (u in X) == (v in X):
            return False
        return self.board.is_edge(u, v)

    def free(self, u: int, v: int) -> bool:
        return self.allowed(u, v) and norm(u, v) not in self.board.owner

    def d_B(self, z: int, within: set[int] | None = None) -> int:
        S = self.vset if within is None else within
        return sum(1 for w in self.board.adj[1 - self.me][z] if w in S and self.allowed(z, w))

    def e_B(self, S: set[int]) -> int:
        return sum(self.d_B(z, S) for z in S) // 2

    @property
    def stage(self) -> PmStage:
        return self.mem.stage

    # moves -----------------------------------------------------------------

    def next_move(self) -> list[Edge]:
        m = self.mem
        if m.stage is PmStage.I and m.i >= self.stage1_moves:
            m.stage = PmStage.II
        if m.stage is PmStage.I:
            return self._stage1()
        if m.stage is PmStage.II:
            return self._stage2()
        return []

    def _partners(self, x: int, S: set[int]) -> list[int]:
        return [z for z in S if z != x and self.free(x, z)]

    def _stage1(self) -> list[Edge]:
        m = self.mem
        a, C = m.a, m.C
        m.i += 1
        i = m.i
        delta = 0 if i <= math.ceil(C / a) else 1
        S = set(m.I)
        edges: list[Edge] = []
        p = self.prefix
        for j in range(1, a - delta + 1):
            deg = {z: self.d_B(z, S) for z in S}
            order = sorted(S, key=lambda z: (-deg[z], z))
            x = next((z for z in order if self._partners(z, S)), None)
            if x is None:
                raise StrategyFailure(f"{p}: no free edge inside the isolated set (move {i}, step {j})")
            self.log.check(f"{p}.stage1_rule", x == order[0], f"move {i} step {j}: top vertex has no partner")
            y = min(self._partners(x, S), key=lambda z: (-deg[z], z))
            edges.append(norm(x, y))
            S -= {x, y}
            bound = max(C - (i - 2) * a - 2 * j, a - 2 * j, 0)
            eb = self.e_B(S)
            self.log.check(f"{p}.independent_edges", eb <= bound, f"move {i} step {j}: e_B(I)={eb} > {bound}")
        if delta == 1:
            tot = {z: self.d_B(z) for z in S}
            order = sorted(S, key=lambda z: (-tot[z], z))
            x = next((z for z in order if self._partners(z, S)), None)
            if x is None:
                raise StrategyFailure(f"{p}: no free edge for e_a (move {i})")
            y = min(self._partners(x, S), key=lambda z: (-tot[z], z))
            edges.append(norm(x, y))
            S -= {x, y}
        for u, v in edges:
            m.M[u] = v
            m.M[v] = u
        m.I = S
        eb = self.e_B(S)
        self.log.check(f"{p}.P1", eb <= max(C - i * a, 0), f"move {i}: e_B(I)={eb}")
        limit = self.h / 8
        worst = max((self.d_B(v) for v in S), default=0)
        self.log.check(f"{p}.P2", worst < limit, f"move {i}: max d_B on I = {worst} >= {limit:g}")
        self.log.check(f"{p}.matching", len(m.M) == 2 * i * a, f"move {i}: matching size {len(m.M) // 2}")
        return edges

    # Stage II --------------------------------------------------------------

    def _cost(self, u: int, v: int) -> int | None:
        o = self.board.owner.get(norm(u, v))
        if not self.allowed(u, v):
            return None
        if o is None:
            return 1
        return 0 if o == self.me else None

    def plan(self) -> list[Edge]:
        """Cheapest set of free edges completing a perfect matching."""
        m = self.mem
        U = sorted(v for v in self.vset if v not in m.M)
        g = nx.Graph()
        g.add_nodes_from(U)
        for ii, u in enumerate(U):
            for w in U[ii + 1 :]:
                c = self._cost(u, w)
                if c is not None:
                    g.add_edge(u, w, weight=2 - c)
        direct = nx.max_weight_matching(g, maxcardinality=True)
        free_edges: list[Edge] = []
        covered: set[int] = set()
        for u, w in sorted(norm(u, w) for u, w in direct):
            covered |= {u, w}
            if self._cost(u, w) == 1:
                free_edges.append((u, w))
        rest = [v for v in U if v not in covered]
        swaps = self._swaps(rest, set())
        if swaps is None:
            raise StrategyFailure(f"{self.prefix}: no swap completes the matching for {rest}")
        t = len(U) // 2
        if not m.case:
            if t <= m.a / 2:
                m.case = "1.1"
            elif t < m.a:
                m.case = "1.2"
            else:
                m.case = "2.1" if m.X is None else "2.2"
            pairs = (len(U) - len(rest)) // 2
            need = t if m.case == "2.1" else (t - 1 if m.case in ("1.2", "2.2") else 0)
            self.log.check(f"{self.prefix}.stage2_case", pairs >= need,
                           f"case {m.case}: direct matching {pairs} of {t}")
        return free_edges + swaps

    def _swaps(self, rest: list[int], used: set[int]) -> list[Edge] | None:
        if not rest:
            return []
        v = rest[0]
        X = self.mem.X
        options = []
        for w in rest[1:]:
            if X is not None and (v in X) == (w in X):
                continue
            best = None
            for x, y in self._matched_edges(used):
                for xx, yy in ((x, y), (y, x)):
                    c1, c2 = self._cost(v, xx), self._cost(w, yy)
                    if c1 is None or c2 is None:
                        continue
                    cand = (c1 + c2, xx, yy)
                    if best is None or cand < best:
                        best = cand
            if best is not None:
                options.append((best[0], w, best[1], best[2]))
        for _, w, xx, yy in sorted(options):
            sub = self._swaps([u for u in rest if u not in (v, w)], used | {xx, yy})
            if sub is not None:
                mine = [e for e in (norm(v, xx), norm(w, yy)) if self.board.owner.get(e) is None]
                return mine + sub
        return None

    def _matched_edges(self, used: set[int]):
        M = self.mem.M
        for x in sorted(M):
            y = M[x]
            if x < y and x not in used and y not in used:
                yield x, y

    def _stage2(self) -> list[Edge]:
        return self.plan()


class PmStrategy(BaseStrategy):
    """Maker's strategy for the perfect-matching game.

    On K_n Maker ignores vertex n-1 when n is odd. ``variant`` chooses the
    bipartition-free play on complete boards ("general") or the literal
    K_{n/2,n/2} play with X = {0..n/2-1} ("bipartite").
    """

    name = "pm"

    def __init__(self, variant: str = "general", C: int = 0):
        super().__init__()
        self.variant = variant
        self.C = C

    def setup(self, state: GameState) -> None:
        board = state.board
        n = board.n
        verts = list(range(n - (n % 2)))
        sides = None
        if board.kind == "bip":
            sides = (set(range(board.left)), set(range(board.left, n)))
        elif self.variant == "bipartite":
            h = len(verts) // 2
            sides = (set(range(h)), set(range(h, len(verts))))
        C = self.C or len(state.handicap)
        a = state.config.bias(self.role)
        self.core = PmCore(board, verts, a, sides=sides, C=C, log=self.log, me=self.side)

    def next_move(self, state: GameState) -> list[Edge]:
        return self.core.next_move()
