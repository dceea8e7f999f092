"""Maker's perfectly fast strategy for the (a:a) P_k-factor game, k >= 3.

Maker grows n/k vertex-disjoint paths. Paths with at most k-3 edges are
unfinished, those with k-2 edges finished, those with k-1 edges complete.
Stage I finishes every path while keeping Breaker's edges spread out,
Stage II completes finished paths one edge at a time and Stage III closes
the factor in a single move.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from ..engine import Edge, GameState, norm
from ..errors import StrategyFailure
from ..graphtools import max_bipartite_matching
from .common import BaseStrategy
from .pm import PmStrategy


class PkStage(Enum):
    I = "I"
    II = "II"
    III = "III"


def default_delta(k: int) -> float:
    return 1 / (8 * k) - 1 / (64 * k * k)


@dataclass
class PkMemory:
    """Maker's paths and the bookkeeping shared by all stages."""

    paths: dict[int, list[int]] = field(default_factory=dict)
    end: dict[int, int] = field(default_factory=dict)
    U: set[int] = field(default_factory=set)
    H: set[Edge] = field(default_factory=set)
    stage: PkStage = PkStage.I
    T: int = 0
    stage2_left: int = 0
    moves: int = 0
    rules: list[str] = field(default_factory=list)

    def length(self, pid: int) -> int:
        return len(self.paths[pid]) - 1

    def ends(self, pid: int) -> list[int]:
        p = self.paths[pid]
        return [p[0]] if len(p) == 1 else [p[0], p[-1]]

    def extend(self, pid: int, at: int, u: int) -> None:
        p = self.paths[pid]
        if len(p) == 1:
            p.append(u)
        elif p[-1] == at:
            p.append(u)
            del self.end[at]
        elif p[0] == at:
            p.insert(0, u)
            del self.end[at]
        else:
            raise StrategyFailure(f"pk: {at} is not an endpoint of path {pid}")
        self.end[u] = pid
        self.U.discard(u)

    def copy(self) -> PkMemory:
        return PkMemory(
            paths={k: list(v) for k, v in self.paths.items()},
            end=dict(self.end),
            U=set(self.U),
            H=set(self.H),
            stage=self.stage,
            T=self.T,
            stage2_left=self.stage2_left,
            moves=self.moves,
        )


class PkStrategy(BaseStrategy):
    name = "pkf"

    def __init__(self, delta: float | None = None):
        super().__init__()
        self.delta = delta
        self.pm: PmStrategy | None = None

    def setup(self, state: GameState) -> None:
        cfg = state.config
        self.k = k = cfg.family.k
        self.board = state.board
        self.n = n = state.board.n
        self.a = cfg.bias(self.role)
        self.opp = 1 - self.side
        if k == 2:
            self.pm = PmStrategy()
            self.pm.start(state, self.role, self.rng)
            self.log = self.pm.log
            return
        if n % k:
            raise StrategyFailure(f"pkf: k={k} does not divide n={n}")
        self.dn = (self.delta if self.delta is not None else default_delta(k)) * n
        m = self.mem = PkMemory()
        for pid in range(n // k):
            m.paths[pid] = [pid]
            m.end[pid] = pid
        m.U = set(range(n // k, n))

    # Breaker-graph counts ----------------------------------------------------

    def nb(self, v: int) -> set[int]:
        return self.board.adj[self.opp][v]

    def d_B(self, v: int) -> int:
        return len(self.nb(v))

    def d_to(self, v: int, S, H: set[Edge] = frozenset()) -> int:
        c = 0
        for w in self.nb(v):
            if w in S and (not H or norm(v, w) not in H):
                c += 1
        return c

    def cls(self, pid: int) -> str:
        ln = self.mem.length(pid)
        if ln <= self.k - 3:
            return "u"
        return "f" if ln == self.k - 2 else "c"

    def of_class(self, *names: str) -> list[int]:
        return [pid for pid in sorted(self.mem.paths) if self.cls(pid) in names]

    def end_set(self, *names: str) -> set[int]:
        return {v for pid in self.of_class(*names) for v in self.mem.ends(pid)}

    def path_sum(self, pid: int, H: set[Edge] = frozenset()) -> int:
        """d(v1, U) + d(v2, U); a one-vertex path counts its vertex twice."""
        U = self.mem.U
        p = self.mem.paths[pid]
        return self.d_to(p[0], U, H) + self.d_to(p[-1], U, H)

    def free(self, u: int, v: int, pending: set[Edge]) -> bool:
        return self.board.is_free(u, v) and norm(u, v) not in pending

    # goodness ----------------------------------------------------------------

    def good(self, H: set[Edge]) -> tuple[bool, str]:
        """(Q1)-(Q3) for the graph B minus H."""
        m = self.mem
        E = self.end_set("u", "f")
        for u in sorted(m.U):
            if self.d_to(u, E, H) >= self.dn:
                return False, f"Q1 at {u}"
            if self.d_to(u, m.U, H):
                return False, f"Q2 at {u}"
        for pid in self.of_class("u", "f"):
            if self.path_sum(pid, H) > 1:
                return False, f"Q3 at path {pid}"
        return True, ""

    # moves -------------------------------------------------------------------

    def next_move(self, state: GameState) -> list[Edge]:
        if self.pm is not None:
            return self.pm.next_move(state)
        m = self.mem
        m.moves += 1
        if m.stage is PkStage.I:
            return self.stage1(state)
        if m.stage is PkStage.II and m.stage2_left > 0:
            return self.stage2()
        m.stage = PkStage.III
        return self.stage3()

    # Stage I -------------------------------------------------------------------

    def stage1(self, state: GameState) -> list[Edge]:
        m, a = self.mem, self.a
        m.H = {norm(*e) for e in self.last_opponent_move(state)}
        pending: set[Edge] = set()
        edges: list[Edge] = []
        for t in range(a):
            rule, e = self.stage1_step(pending)
            m.rules.append(rule)
            edges.append(e)
            pending.add(e)
            # the witness must keep exactly a - t - 1 edges
            while len(m.H) > a - t - 1:
                m.H.discard(min(m.H))
            ok, why = self.good(m.H)
            self.log.check("pk.Q4", ok, f"move {m.moves} step {t + 1} ({rule}): {why}")
        self.log.check("pk.class_c_count", len(self.of_class("c")) <= a + 3 * self.n / self.dn, "")
        ok, why = self.good(set())
        self.log.check("pk.Q1-Q3", ok, f"move {m.moves}: {why}")
        if not self.of_class("u"):
            self.enter_stage2()
        return edges

    def enter_stage2(self) -> None:
        m = self.mem
        m.stage = PkStage.II
        m.T = len(self.of_class("c"))
        m.stage2_left = math.ceil((self.n // self.k - m.T) / self.a) - 1
        self.log.check(
            "pk.stage1_rounds",
            m.moves * self.a == self.n * (self.k - 2) // self.k + m.T,
            f"moves={m.moves} T={m.T}",
        )

    def _attach(self, pid: int, u: int, pending: set[Edge], prefer_bad: bool = True) -> Edge | None:
        """Free edge joining u to an endpoint of path pid; prefers the endpoint with more Breaker edges into U."""
        ends = self.mem.ends(pid)
        ends = sorted(ends, key=lambda v: (-self.d_to(v, self.mem.U), v)) if prefer_bad else sorted(ends)
        for v in ends:
            if v != u and self.free(u, v, pending):
                return norm(u, v)
        return None

    def _do(self, pid: int, at: int, u: int) -> Edge:
        self.mem.extend(pid, at, u)
        return norm(at, u)

    def _drop_H(self, e: Edge | None, rule: str) -> None:
        H = self.mem.H
        if e is not None and e in H:
            H.discard(e)
        else:
            self.log.check("pk.witness", False, f"{rule}: edge {e} not in H")

    def by_length(self, pids: list[int]) -> list[int]:
        return sorted(pids, key=lambda q: (self.mem.length(q), q))

    def stage1_step(self, pending: set[Edge]) -> tuple[str, Edge]:
        m, a = self.mem, self.a
        U = m.U
        E = self.end_set("u", "f")
        Pu = self.of_class("u")
        thr = self.dn
        # R1
        heavy = [u for u in sorted(U) if self.d_to(u, E) >= thr]
        if heavy:
            u = max(heavy, key=lambda x: (self.d_to(x, E), -x))
            g = next((norm(u, x) for x in sorted(self.nb(u)) if x in E and norm(u, x) in m.H), None)
            pool = Pu if len(Pu) >= a + 1 else self.of_class("f")
            cands = [q for q in self.by_length(pool) if self.path_sum(q) <= 1] + [
                q for q in self.by_length(pool) if self.path_sum(q) > 1
            ]
            for q in cands:
                e = self._attach(q, u, pending)
                if e is not None:
                    at = e[0] if e[1] == u else e[1]
                    self._drop_H(g, "R1")
                    return "R1", self._do(q, at, u)
            return self.fallback("R1")
        # R2 / R3
        for rule, pool in (("R2", Pu), ("R3", self.of_class("f"))):
            for q in pool:
                if self.path_sum(q) < 2:
                    continue
                g = None
                for v in m.ends(q):
                    for x in sorted(self.nb(v)):
                        if x in U and norm(v, x) in m.H:
                            g = (v, x)
                            break
                    if g:
                        break
                if g is None:
                    self.log.check("pk.witness", False, f"{rule}: path {q} has no witness edge")
                    v = max(m.ends(q), key=lambda y: (self.d_to(y, U), -y))
                    x = None
                else:
                    v, x = g
                if rule == "R3" and Pu and x is not None:
                    for q0 in self.by_length(Pu):
                        e = self._attach(q0, x, pending)
                        if e is not None:
                            at = e[0] if e[1] == x else e[1]
                            self._drop_H(norm(v, x), "R3a")
                            return "R3a", self._do(q0, at, x)
                    return self.fallback("R3a")
                u = self._pick_u(v, pending)
                if u is None:
                    return self.fallback(rule)
                self._drop_H(norm(v, x) if x is not None else None, rule)
                return (rule if rule == "R2" else "R3b"), self._do(q, v, u)
        # R4
        inside = sorted({norm(u, w) for u in U for w in self.nb(u) if w in U}, key=lambda e: (e not in m.H, e))
        if inside:
            u, w = inside[0]
            du, dw = self.d_to(u, E), self.d_to(w, E)
            if dw > du:
                u, w, du, dw = w, u, dw, du
            if du == dw and du >= thr - 1:
                for x in sorted(self.nb(w)):
                    if x in E and x != u and self.free(u, x, pending):
                        self._drop_H(norm(x, w) if norm(x, w) in m.H else norm(u, w), "R4a")
                        return "R4a", self._do(m.end[x], x, u)
                return self.fallback("R4a")
            if du >= thr - 1 > dw:
                for q in self.by_length(self.of_class("u", "f")):
                    ends = m.ends(q)
                    if any(y in self.nb(u) for y in ends):
                        continue
                    for i, vi in enumerate(ends):
                        if self.d_to(vi, U) == 0:
                            other = ends[1 - i] if len(ends) == 2 else vi
                            if self.free(u, other, pending):
                                self._drop_H(norm(u, w), "R4b")
                                return "R4b", self._do(q, other, u)
                return self.fallback("R4b")
            for q in self.by_length(Pu) + self.by_length(self.of_class("f")):
                ends = m.ends(q)
                vi = max(ends, key=lambda y: (self.d_to(y, U), -y))
                for z in (u, w):
                    if self.free(vi, z, pending):
                        self._drop_H(norm(u, w), "R4c")
                        return "R4c", self._do(q, vi, z)
            return self.fallback("R4c")
        # R5
        if m.H:
            m.H.discard(min(m.H))
        for q in self.by_length(self.of_class("u", "f")):
            for u in sorted(U, key=lambda x: (-self.d_B(x), x)):
                e = self._attach(q, u, pending)
                if e is not None:
                    at = e[0] if e[1] == u else e[1]
                    return "R5", self._do(q, at, u)
        return self.fallback("R5")

    def _pick_u(self, v: int, pending: set[Edge]) -> int | None:
        """A vertex of U joinable to v; Breaker-heavy vertices first."""
        for u in sorted(self.mem.U, key=lambda x: (-self.d_B(x), x)):
            if self.free(u, v, pending):
                return u
        return None

    def fallback(self, rule: str) -> tuple[str, Edge]:
        """Used only when a rule's promised edge is missing; the failure is logged."""
        self.log.check("pk.rule_precondition", False, f"{rule}: promised edge not found")
        m = self.mem
        for q in self.by_length(self.of_class("u")) + self.by_length(self.of_class("f")):
            for u in sorted(m.U, key=lambda x: (-self.d_B(x), x)):
                for v in m.ends(q):
                    if self.board.is_free(u, v):
                        return rule + "*", self._do(q, v, u)
        raise StrategyFailure(f"pkf: no path extension available ({rule})")

    # Stage II ----------------------------------------------------------------

    def sums(self) -> dict[int, int]:
        return {q: self.path_sum(q) for q in self.of_class("f")}

    @staticmethod
    def phi(s: dict[int, int]) -> int:
        return sum(x - 1 for x in s.values() if x >= 2)

    def sums_after(self, s: dict[int, int], pid: int, u: int) -> dict[int, int]:
        out = dict(s)
        del out[pid]
        end = self.mem.end
        for y in self.nb(u):
            q = end.get(y)
            if q in out:
                out[q] -= 1
        return out

    def good_edges(self, pending: set[Edge], pids=None, us=None) -> list[tuple[int, int, int]]:
        """Free (path, endpoint, u) triples between End(P_f) and U, optionally filtered."""
        m = self.mem
        out = []
        U = sorted(m.U) if us is None else sorted(set(us) & m.U)
        for q in self.of_class("f") if pids is None else sorted(pids):
            for v in m.ends(q):
                for u in U:
                    if self.free(u, v, pending):
                        out.append((q, v, u))
        return out

    def stage2(self) -> list[Edge]:
        m, a = self.mem, self.a
        m.stage2_left -= 1
        last_move = m.stage2_left == 0
        pending: set[Edge] = set()
        edges: list[Edge] = []
        for j in range(a):
            s = self.sums()
            phi = self.phi(s)
            if last_move and j == a - 1:
                q, v, u = self.e_end(s, pending)
            else:
                q, v, u, top = self.stage2_step(s, pending)
                self.log.check("pk.rule_b", top in set(m.ends(q)) | {u}, f"move {m.moves} step {j + 1}")
            s2 = self.sums_after(s, q, u)
            if phi > 0:
                self.log.check("pk.rule_a", self.phi(s2) < phi, f"move {m.moves}: phi {phi} -> {self.phi(s2)}")
            e = self._do(q, v, u)
            edges.append(e)
            pending.add(e)
            p = len(self.of_class("f"))
            br = sum(s2.values())
            self.log.check("pk.stage2_potential", self.phi(s2) < max(p, 1) and br < max(2 * p, 1), f"phi={self.phi(s2)} br={br} p={p}")
        s = self.sums()
        self.log.check("pk.F1", all(x <= 1 for x in s.values()), f"move {m.moves}: {s}")
        if last_move:
            self.log.check("pk.rule_c", any(x == 0 for x in s.values()) or not s, f"move {m.moves}")
        if m.stage2_left == 0:
            m.stage = PkStage.III
        return edges

    def stage2_step(self, s: dict[int, int], pending: set[Edge]) -> tuple[int, int, int, int]:
        m = self.mem
        phi = self.phi(s)
        Ef = self.end_set("f")
        top = min(Ef | m.U, key=lambda x: (-self.d_B(x), x))

        def gain(q: int, u: int) -> tuple:
            return (self.phi(self.sums_after(s, q, u)), -self.d_B(u), u)

        if top in Ef:
            P = m.end[top]
            if phi == 0 or s[P] >= 2:
                opts = self.good_edges(pending, pids=[P])
                if opts:
                    q, v, u = min(opts, key=lambda t: gain(t[0], t[2]) + (t[1],))
                    return q, v, u, top
            else:
                for x in m.ends(P):
                    if self.d_to(x, m.U):
                        continue
                    opts = []
                    for P0 in s:
                        if P0 == P or s[P0] < 2:
                            continue
                        for v0 in m.ends(P0):
                            for u0 in self.nb(v0):
                                if u0 in m.U and self.free(x, u0, pending):
                                    opts.append((P, x, u0))
                    if opts:
                        q, v, u = min(opts, key=lambda t: gain(t[0], t[2]))
                        return q, v, u, top
        else:
            u = top
            if phi == 0:
                opts = self.good_edges(pending, us=[u])
                if opts:
                    q, v, _ = min(opts, key=lambda t: (-max(self.d_B(y) for y in m.ends(t[0])), t[0], t[1]))
                    return q, v, u, top
            else:
                bad = [q for q in sorted(s) if s[q] >= 2]
                for P in bad:
                    for v in m.ends(P):
                        if self.free(u, v, pending):
                            return P, v, u, top
                opts = [t for t in self.good_edges(pending, us=[u]) if t[0] not in bad[:1]]
                if opts:
                    q, v, _ = min(opts, key=lambda t: gain(t[0], u) + (t[1],))
                    return q, v, u, top
        self.log.check("pk.rule_precondition", False, "stage II: constructed edge missing")
        opts = self.good_edges(pending)
        if not opts:
            raise StrategyFailure("pkf: no good edge in Stage II")
        q, v, u = min(opts, key=lambda t: gain(t[0], t[2]))
        return q, v, u, top

    def e_end(self, s: dict[int, int], pending: set[Edge]) -> tuple[int, int, int]:
        """Last Stage II edge: afterwards phi = 0 and some finished path is clean."""
        m = self.mem
        phi = self.phi(s)

        def ok(q: int, u: int) -> bool:
            s2 = self.sums_after(s, q, u)
            return self.phi(s2) == 0 and (not s2 or min(s2.values()) == 0)

        choice = None
        if phi == 1:
            P0 = next(q for q in sorted(s) if s[q] >= 2)
            others = sorted((q for q in s if q != P0), key=lambda q: (s[q], q))
            P = others[0] if others else None
            if P is not None and s[P] == 0:
                choice = next(iter(self.good_edges(pending, pids=[P0])), None)
            elif P is not None:
                u = next(y for v in m.ends(P) for y in self.nb(v) if y in m.U)
                if self.d_to(u, set(m.ends(P0))) <= 1:
                    choice = next(((P0, v, u) for v in m.ends(P0) if self.free(u, v, pending)), None)
                else:
                    choice = next(((P, v, u) for v in m.ends(P) if self.free(u, v, pending)), None)
        elif phi == 0:
            clean = [q for q in sorted(s) if s[q] == 0]
            if clean and len(s) >= 2:
                choice = next(((q, v, u) for (q, v, u) in self.good_edges(pending) if q != clean[0]), None)
            elif s:
                P = min(s)
                u = next((y for v in m.ends(P) for y in self.nb(v) if y in m.U), None)
                if u is not None:
                    choice = next((t for t in self.good_edges(pending, us=[u]) if t[0] != P), None)
        if choice is None or not ok(choice[0], choice[2]):
            choice = next(((q, v, u) for (q, v, u) in self.good_edges(pending) if ok(q, u)), None)
            self.log.check("pk.rule_precondition", False, f"e_end: constructed edge missing (phi={phi})")
        if choice is None:
            opts = self.good_edges(pending)
            if not opts:
                raise StrategyFailure("pkf: no good edge for e_end")
            choice = opts[0]
        return choice

    # Stage III ---------------------------------------------------------------

    def stage3(self) -> list[Edge]:
        m, a = self.mem, self.a
        U = sorted(m.U)
        Pf = self.of_class("f")
        if not U:
            return []
        worst = max(self.d_B(v) for v in set(U) | self.end_set("f"))
        self.log.check("pk.stage3_degree", worst < 2 * self.dn, f"max degree {worst} vs 2*delta*n={2 * self.dn:.1f}")
        if len(U) != len(Pf) or len(U) > a:
            raise StrategyFailure(f"pkf: Stage III with |U|={len(U)} and {len(Pf)} finished paths")
        pending: set[Edge] = set()
        edges: list[Edge] = []
        used_R: set[int] = set()
        if 2 * len(U) <= a:
            pairs = list(zip(U, Pf))
            unmatched = pairs
        else:
            adj = {u: {q for q in Pf if self.d_to(u, set(m.ends(q))) <= 1} for u in U}
            match, _ = max_bipartite_matching(U, Pf, adj)
            for u in U:
                if u in match:
                    q = match[u]
                    v = next(v for v in m.ends(q) if self.free(u, v, pending))
                    edges.append(norm(u, v))
                    pending.add(norm(u, v))
            rest_u = [u for u in U if u not in match]
            rest_p = [q for q in Pf if q not in set(match.values())]
            unmatched = list(zip(rest_u, rest_p))
        for u, q in unmatched:
            splice = self.splice(u, q, used_R, pending)
            if splice is None:
                raise StrategyFailure(f"pkf: no complete path to splice u={u} into path {q}")
            edges.extend(splice)
            pending.update(splice)
        if len(edges) > a:
            raise StrategyFailure(f"pkf: Stage III needs {len(edges)} > {a} edges")
        return edges

    def splice(self, u: int, q: int, used: set[int], pending: set[Edge]) -> list[Edge] | None:
        """Edges u-R-P through a complete path R, forming a P_2k."""
        m = self.mem
        for R in self.of_class("c"):
            if R in used:
                continue
            r = m.paths[R]
            for r1, r2 in ((r[0], r[-1]), (r[-1], r[0])):
                if not self.free(u, r1, pending):
                    continue
                for v in m.ends(q):
                    if self.free(r2, v, pending):
                        used.add(R)
                        return [norm(u, r1), norm(r2, v)]
        return None
