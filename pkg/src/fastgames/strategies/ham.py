"""Maker's (a:a) Hamilton-cycle strategy for a >= 2.

Stage I builds a spanning linear forest from a perfect matching, Stage II
joins paths by good edges (IIa: most adjacent bad edges, IIb: around the
endpoint of largest Breaker degree), Stage III closes the cycle with
rotations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from ..engine import Edge, GameState, norm
from ..errors import DegreeConditionViolated, StrategyFailure
from ..graphtools import ComplementGraph, PathCollection, close_path, complete_hamilton, rotate_merge
from .common import BaseStrategy, free_edge_filler
from .pm import PmCore


class HamStage(Enum):
    I = "I"
    IIA = "IIa"
    IIB = "IIb"
    III = "III"


@dataclass
class HamMemory:
    paths: PathCollection | None = None
    stage: HamStage = HamStage.I
    t1: int | None = None
    t2: int = 0
    i: int = 0
    br_prev: int | None = None
    p_prev: int | None = None
    case: str = ""
    hamilton_path: list[int] | None = None
    history: list[tuple[int, int, int]] = field(default_factory=list)


def bad_degrees(coll: PathCollection, opp_adj) -> dict[int, int]:
    """Number of bad edges at every endpoint."""
    out: dict[int, int] = {}
    end = coll.end
    for x, pid in end.items():
        c = 0
        for w in opp_adj[x]:
            q = end.get(w)
            if q is not None and q != pid:
                c += 1
        out[x] = c
    return out


class HamStrategy(BaseStrategy):
    name = "ham"

    def __init__(self, fast_finish: bool = False):
        super().__init__()
        self.fast_finish = fast_finish

    # setup -------------------------------------------------------------------

    def setup(self, state: GameState) -> None:
        self.board = state.board
        self.n = n = state.board.n
        self.a = a = state.config.bias(self.role)
        self.opp = 1 - self.side
        self.mem = HamMemory(t2=math.ceil(n / a) - math.ceil(n / (6 * a * a)))
        self.last = math.ceil(n / a) - 1
        self.odd = n % 2
        verts = list(range(n - self.odd))
        self.R1 = math.ceil(len(verts) / (2 * a))
        self.core = PmCore(state.board, verts, a, log=self.log, prefix="ham.stageI", me=self.side)

    # helpers -----------------------------------------------------------------

    def free(self, u: int, v: int, pending: set[Edge] = frozenset()) -> bool:
        return self.board.is_free(u, v) and norm(u, v) not in pending

    def d_B(self, v: int) -> int:
        return self.board.deg(self.opp, v)

    def _collection(self, pending: list[Edge], vertices=None) -> PathCollection:
        adj = [set(s) for s in self.board.adj[self.side]]
        for u, v in pending:
            adj[u].add(v)
            adj[v].add(u)
        return PathCollection.from_graph(self.n, adj, vertices)

    def _pad(self, coll: PathCollection, count: int, pending: list[Edge]) -> None:
        """Forest-preserving edges joining the shortest paths first."""
        taken = set(pending)
        for _ in range(count):
            pids = sorted(coll.paths, key=lambda k: (len(coll.paths[k]), min(coll.paths[k])))
            choice = None
            for ii, A in enumerate(pids):
                for B in pids[ii + 1 :]:
                    ea = sorted({coll.paths[A][0], coll.paths[A][-1]})
                    eb = sorted({coll.paths[B][0], coll.paths[B][-1]})
                    for u in ea:
                        for w in eb:
                            if self.free(u, w, taken):
                                choice = (u, w)
                                break
                        if choice:
                            break
                    if choice:
                        break
                if choice:
                    break
            if choice is None:
                raise StrategyFailure("ham: no forest-preserving edge for padding")
            coll.join(*choice)
            pending.append(norm(*choice))
            taken.add(norm(*choice))

    def iia_edge(self, coll: PathCollection, pending: set[Edge], check: bool = True) -> tuple[Edge, int]:
        """Good edge of maximal D.

        Ties prefer an edge whose merge also removes the bad edge between the
        two far ends, then endpoints of larger Breaker degree, then longer
        paths, then low vertex numbers.
        """
        opp_adj = self.board.adj[self.opp]
        bd = bad_degrees(coll, opp_adj)
        p = len(coll)
        br = sum(bd.values()) // 2
        big = 4 * self.n
        f = {x: (bd[x] * big + self.d_B(x)) * big + len(coll.path_of(x)) for x in coll.end}
        order = sorted(coll.end, key=lambda x: (-f[x], x))
        end = coll.end
        best = None
        for ii, u in enumerate(order):
            if best is not None and (ii + 1 >= len(order) or f[u] + f[order[ii + 1]] <= best[0]):
                break
            for w in order[ii + 1 :]:
                s = f[u] + f[w]
                if best is not None and s <= best[0]:
                    break
                if end[u] != end[w] and self.free(u, w, pending):
                    best = (s, u, w)
                    break
        if best is None:
            raise StrategyFailure(f"ham: no good edge (p={p}, br={br})")
        _, u, w = best
        D = bd[u] + bd[w]
        bonus = self._closure_pair(coll, bd, order, D, pending)
        if bonus is not None:
            u, w = bonus
        if check and p >= 2:
            n_ends = len(end)
            sizes = {pid: (1 if len(q) == 1 else 2) for pid, q in coll.paths.items()}
            has_good = all(n_ends - sizes[end[x]] - bd[x] > 0 for x in end)
            if p > 2 and br < 2 * p - 2:
                self.log.check("ham.stage1.good_edge_exists", has_good, f"p={p} br={br}")
            if has_good and D <= 1:
                self.log.check("ham.stage1.at_most_one_bad", br <= 1, f"p={p} br={br}")
            if has_good and D <= 2 and p >= 4:
                self.log.check("ham.stage1.bad_le_paths", br <= p, f"p={p} br={br}")
        pre = (p, br)
        coll.join(u, w)
        if check and pre[0] > 2 and pre[1] < 2 * pre[0] - 2:
            bd2 = bad_degrees(coll, opp_adj)
            br2 = sum(bd2.values()) // 2
            ok = br2 < 2 * len(coll) - 2 and (D > 1 or br2 == 0)
            self.log.check("ham.stage1.merge_drops_bad", ok, f"before p={p} br={br} D={D}; after br={br2}")
        return norm(u, w), D

    def _closure_pair(self, coll: PathCollection, bd: dict[int, int], order: list[int], D: int, pending) -> tuple[int, int] | None:
        """A max-D good edge uw whose merge also removes the bad edge u'w'.

        u' and w' are the far ends of the two paths, which become the ends of
        the merged path.
        """
        end = coll.end
        opp = self.board.adj[self.opp]
        for u in order:
            pu = coll.path_of(u)
            if len(pu) == 1:
                continue
            uo = pu[-1] if pu[0] == u else pu[0]
            for z in sorted(opp[uo]):
                q = end.get(z)
                if q is None or q == end[u]:
                    continue
                pz = coll.paths[q]
                if len(pz) == 1:
                    continue
                w = pz[-1] if pz[0] == z else pz[0]
                if bd[u] + bd[w] == D and self.free(u, w, pending):
                    return u, w
        return None

    def iib_edge(self, coll: PathCollection, pending: set[Edge]) -> Edge:
        end = coll.end
        bd = bad_degrees(coll, self.board.adj[self.opp])
        for x in sorted(end, key=lambda v: (-self.d_B(v), -bd[v], v)):
            partners = [w for w in end if end[w] != end[x] and self.free(x, w, pending)]
            if partners:
                px = coll.path_of(x)
                xo = px[-1] if px[0] == x else px[0]
                opp = self.board.adj[self.opp]

                def removed(w: int) -> int:
                    pw = coll.path_of(w)
                    wo = pw[-1] if pw[0] == w else pw[0]
                    return bd[w] + (1 if wo in opp[xo] else 0)

                y = min(partners, key=lambda w: (-removed(w), self.d_B(w), w))
                coll.join(x, y)
                return norm(x, y)
        raise StrategyFailure("ham: no good edge in Stage IIb")

    def br_now(self, coll: PathCollection) -> int:
        return sum(bad_degrees(coll, self.board.adj[self.opp]).values()) // 2

    # moves -------------------------------------------------------------------

    def next_move(self, state: GameState) -> list[Edge]:
        m = self.mem
        m.i += 1
        i = m.i
        if m.t1 is None:
            edges = self._stage1(i)
        elif i <= self.last:
            edges = self._stage2(i)
        else:
            m.stage = HamStage.III
            edges = self._stage3(i)
        return self.pad(edges)

    def pad(self, edges: list[Edge]) -> list[Edge]:
        """Top up a short move with free edges; extras after a win are ignored."""
        return edges + free_edge_filler(self.board, set(edges), self.a - len(edges))

    def _stage1(self, i: int) -> list[Edge]:
        m = self.mem
        a = self.a
        verts = range(self.n - self.odd)
        if i <= self.R1:
            edges = list(self.core.next_move())
            if i == self.R1:
                coll = self._collection(edges, verts)
                self._pad(coll, a - len(edges), edges)
                if not self.odd:
                    self._enter_stage2(i, coll)
            return edges
        # odd n: attach the spare vertex, then a-1 forest edges
        v = self.n - 1
        coll = self._collection([], verts)
        ends = sorted(coll.end, key=lambda x: (len(coll.path_of(x)), x))
        x = next((x for x in ends if self.free(x, v)), None)
        if x is None:
            raise StrategyFailure("ham: spare vertex cannot be attached")
        coll._add([v])
        coll.join(x, v)
        edges = [norm(x, v)]
        self._pad(coll, a - 1, edges)
        self._enter_stage2(i, coll)
        return edges

    def _enter_stage2(self, i: int, coll: PathCollection) -> None:
        m = self.mem
        m.t1 = i + 1
        m.paths = coll
        m.br_prev = self.br_now(coll)
        m.p_prev = len(coll)
        self._forest_check(i, coll)

    def _forest_check(self, i: int, coll: PathCollection) -> None:
        n_cov = sum(len(p) for p in coll.paths.values())
        ok = n_cov == self.n and len(coll) == self.n - i * self.a
        self.log.check("ham.linear_forest", ok, f"move {i}: p={len(coll)}")

    def _stage2(self, i: int) -> list[Edge]:
        m = self.mem
        coll = self._collection([])
        pending: set[Edge] = set()
        edges: list[Edge] = []
        iib = m.t2 + 1 <= i <= m.t2 + 7
        m.stage = HamStage.IIB if iib else HamStage.IIA
        for _ in range(self.a):
            if len(coll) < 2:
                raise StrategyFailure("ham: ran out of paths in Stage II")
            e = self.iib_edge(coll, pending) if iib else self.iia_edge(coll, pending)[0]
            edges.append(e)
            pending.add(e)
        m.paths = coll
        self._bad_edge_budget(i, coll)
        self._forest_check(i, coll)
        return edges

    def _bad_edge_budget(self, i: int, coll: PathCollection) -> None:
        m, a = self.mem, self.a
        br, p = self.br_now(coll), len(coll)
        dec = m.br_prev is not None and br - p < m.br_prev - m.p_prev
        t1, t2 = m.t1, m.t2
        if i <= t2:
            self.log.check("ham.stage2a.bad_budget", br <= p + 5 * a, f"move {i}: br={br} p={p}")
            if i >= t1 + 6 * a:
                self.log.check("ham.stage2a.bad_budget", br <= p - a, f"move {i}: br={br} p={p}")
            self.log.check("ham.stage2a.bad_shrinks", br <= max(p - a, 0) or dec, f"move {i}: br={br} p={p}")
        elif i <= t2 + 7:
            self.log.check("ham.stage2b.bad_budget", br <= p + 13 * a, f"move {i}: br={br} p={p}")
        else:
            self.log.check("ham.stage2c.bad_budget", br <= p + 13 * a, f"move {i}: br={br} p={p}")
            if i >= t2 + 14 * a + 8:
                self.log.check("ham.stage2c.bad_budget", br <= max(p - a, 0), f"move {i}: br={br} p={p}")
            self.log.check("ham.stage2c.bad_shrinks", br <= max(p - a, 0) or dec, f"move {i}: br={br} p={p}")
        m.history.append((i, br, p))
        m.br_prev, m.p_prev = br, p

    # Stage III -----------------------------------------------------------------

    def G(self) -> ComplementGraph:
        return ComplementGraph(self.board.adj[self.opp])

    def _closing_pair(self, coll: PathCollection, pending: set[Edge]) -> list[Edge] | None:
        (P1, P2) = coll.as_list()
        x1, y1, x2, y2 = P1[0], P1[-1], P2[0], P2[-1]
        for pair in (((x1, x2), (y1, y2)), ((x1, y2), (y1, x2))):
            if all(self.free(u, v, pending) for u, v in pair):
                return [norm(*e) for e in pair]
        return None

    def _finish(self, coll: PathCollection) -> list[Edge]:
        """complete_hamilton edges that Maker does not own yet."""
        try:
            comp = complete_hamilton(coll.as_list(), self.G())
        except DegreeConditionViolated as exc:
            raise StrategyFailure(f"ham: Stage III completion failed: {exc}") from exc
        return [e for e in comp.edges if self.board.owner.get(e) is None]

    def _stage3(self, i: int) -> list[Edge]:
        m, a = self.mem, self.a
        if m.hamilton_path is not None:
            try:
                return [e for e in close_path(m.hamilton_path, self.G()) if self.board.owner.get(e) is None]
            except DegreeConditionViolated as exc:
                raise StrategyFailure(f"ham: closing the Hamilton path failed: {exc}") from exc
        coll = self._collection([])
        p = len(coll)
        br = self.br_now(coll)
        ends = coll.endpoints()
        self.log.check("ham.stage3_entry.bad_le_a", br <= a, f"br={br} > a={a}")
        worst = max((self.d_B(v) for v in ends), default=0)
        self.log.check("ham.stage3_entry.endpoint_degree", worst < self.n / (3 * a), f"max endpoint d_B={worst}")
        pending: set[Edge] = set()
        edges: list[Edge] = []
        if self.fast_finish and p == 2:
            pair = self._closing_pair(coll, pending)
            if pair is not None and len(pair) <= a:
                m.case = "fast"
                return pair
        if p == 1:
            m.case = "p<=a/2"
            return self._finish(coll)
        if 2 * p <= a:
            m.case = "p<=a/2"
            q = p
        elif 2 * p == a + 1:
            m.case = "p=(a+1)/2"
            q = p - 1
        elif 2 * p == a + 2 and a > 4:
            m.case = "p=(a+2)/2"
            q = p - 2
        elif p == 3 and a == 4:
            m.case = "p=3,a=4"
            q = 1
        elif p == 2 and a == 2:
            m.case = "p=2,a=2"
            return self._merge_two(coll)
        else:
            m.case = "p>=(a+3)/2"
            for _ in range(p - 2):
                e, _ = self.iia_edge(coll, pending)
                edges.append(e)
                pending.add(e)
            pair = self._closing_pair(coll, pending)
            if pair is None:
                raise StrategyFailure("ham: no pair of good closing edges")
            return edges + pair
        for _ in range(p - q):
            e, _ = self.iia_edge(coll, pending, check=False)
            edges.append(e)
            pending.add(e)
        return edges + [e for e in self._finish(coll) if e not in pending]

    def _merge_two(self, coll: PathCollection) -> list[Edge]:
        A, B = sorted(coll.as_list(), key=len, reverse=True)
        G = self.G()
        last_exc: Exception | None = None
        for P1 in (A, A[::-1]):
            for P2 in (B, B[::-1]):
                try:
                    merge = rotate_merge(list(P1), list(P2), G)
                except DegreeConditionViolated as exc:
                    last_exc = exc
                    continue
                self.mem.hamilton_path = merge.path
                return [e for e in merge.added if self.board.owner.get(e) is None]
        raise StrategyFailure(f"ham: rotation merge failed: {last_exc}")
