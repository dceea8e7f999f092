"""Maker's (a:a) S_k-factor strategy, k >= 3.

A fixed set C of n/k centres grows stars evenly, one leaf per centre per
phase. After ceil((k-2)n/(ak)) moves the remaining centres of degree k-2
and the isolated vertices are matched through the perfect-matching
strategy, with Breaker's edges between them acting as a handicap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from ..engine import Edge, GameState, norm
from ..errors import StrategyFailure
from .common import BaseStrategy, InvariantLog
from .pm import PmCore, PmStrategy


class SkStage(Enum):
    I = "I"
    II = "II"


def c_bound(a: int, i: int) -> int:
    """Shipped bad-edge bound for phase i: c(a,0)=0, c(a,i)=2c(a,i-1)+6a."""
    c = 0
    for _ in range(i):
        c = 2 * c + 6 * a
    return c


@dataclass
class SkMemory:
    C: list[int] = field(default_factory=list)
    R: set[int] = field(default_factory=set)
    F: set[int] = field(default_factory=set)
    CA: set[int] = field(default_factory=set)
    phase: int = 1
    phase_steps: dict[int, int] = field(default_factory=dict)
    moves: int = 0
    stage: SkStage = SkStage.I
    N: int = 0
    rules: list[str] = field(default_factory=list)


class SkStrategy(BaseStrategy):
    name = "skf"

    def __init__(self, c_table=None):
        super().__init__()
        self.c_table = c_table or c_bound
        self.pm: PmStrategy | None = None
        self.core: PmCore | None = None
        self.pm_log = InvariantLog()

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
            raise StrategyFailure(f"skf: k={k} does not divide n={n}")
        self.stage1_moves = math.ceil((k - 2) * n / (self.a * k))
        m = self.mem = SkMemory()
        m.C = list(range(n // k))
        m.CA = set(m.C)
        m.R = set(range(n // k, n))

    def bad_edges(self, centres=None) -> int:
        """Breaker edges between the given centres (default C) and R."""
        m = self.mem
        cs = m.C if centres is None else centres
        R = m.R
        return sum(1 for c in cs for w in self.board.adj[self.opp][c] if w in R)

    def bad_at(self, y: int) -> int:
        C = self.mem.C
        return sum(1 for c in self.board.adj[self.opp][y] if c < len(C))

    def monitor(self, when: str) -> None:
        m = self.mem
        if m.phase > self.k - 2:
            return
        b, c = self.bad_edges(), self.c_table(self.a, m.phase)
        ok = self.log.check("sk.c_bound", b <= c, f"{when}: e_B(C,R)={b} > c({self.a},{m.phase})={c}")
        if not ok:
            raise StrategyFailure(f"skf: bad-edge bound c({self.a},{m.phase})={c} exceeded ({b}) {when}")

    def next_move(self, state: GameState) -> list[Edge]:
        if self.pm is not None:
            return self.pm.next_move(state)
        m = self.mem
        m.moves += 1
        if m.moves <= self.stage1_moves:
            return self.stage1()
        if m.stage is SkStage.I:
            self.enter_stage2()
        return self.core.next_move()

    def stage1(self) -> list[Edge]:
        m = self.mem
        self.monitor(f"before move {m.moves}")
        before = self.bad_edges()
        ca_before = len(m.CA)
        edges: list[Edge] = []
        for _ in range(self.a):
            e = self.step()
            edges.append(e)
        after = self.bad_edges()
        if ca_before > before:
            self.log.check(
                "sk.bad_decrease", before - after >= min(self.a, before), f"move {m.moves}: {before} -> {after}"
            )
        self.monitor(f"after move {m.moves}")
        return edges

    def step(self) -> Edge:
        m = self.mem
        t = len(m.CA)
        CA = sorted(m.CA)
        choice = None
        rule = "2"
        heavy = sorted((y for y in m.R if self.bad_at(y)), key=lambda y: (-self.bad_at(y), y))
        for y in heavy:
            x = next((x for x in CA if self.board.is_free(x, y)), None)
            if x is not None:
                choice, rule = (x, y), "1"
                break
        if choice is None:
            for y in sorted(m.R):
                if self.bad_at(y):
                    continue
                x = next((x for x in CA if self.board.is_free(x, y)), None)
                if x is not None:
                    choice = (x, y)
                    break
        if choice is None:
            raise StrategyFailure(f"skf: no free edge between C_A and R (phase {m.phase})")
        x, y = choice
        m.rules.append(rule)
        m.R.discard(y)
        m.F.add(y)
        m.phase_steps[m.phase] = m.phase_steps.get(m.phase, 0) + 1
        if t != 1:
            m.CA.discard(x)
        else:
            done = m.phase
            if done <= self.k - 2:
                steps = m.phase_steps.get(done, 0)
                self.log.check("sk.phase_budget", steps == self.n // self.k, f"phase {done}: {steps} steps")
            m.CA = set(m.C)
            m.phase += 1
        return norm(x, y)

    def enter_stage2(self) -> None:
        m = self.mem
        m.stage = SkStage.II
        k, n, a = self.k, self.n, self.a
        N = (k - 1) * n // k - a * self.stage1_moves
        m.N = N
        self.log.check("sk.handoff", len(m.CA) == len(m.R) == N, f"|C_A|={len(m.CA)} |R|={len(m.R)} N={N}")
        CA, R = set(m.CA), set(m.R)
        C = self.bad_edges(CA)
        self.core = PmCore(
            self.board, sorted(CA | R), a, sides=(CA, R), C=C, log=self.pm_log, prefix="sk.pm", me=self.side
        )
