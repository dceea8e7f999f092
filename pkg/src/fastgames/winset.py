"""Winning-set detectors and closed-form round counts."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Collection, Iterable, Sequence

import networkx as nx

from .engine import Board, Edge, Family, GameKind
from .errors import InvalidConfig, OutOfValidity

Adjacency = Sequence[Collection[int]]


class Tightness(Enum):
    EXACT = "exact"
    UPPER_BOUND = "upper-bound"


@dataclass(frozen=True)
class TauValue:
    """Finite round count, or ``rounds=None`` meaning Breaker wins."""

    rounds: int | None
    tightness: Tightness = Tightness.EXACT

    def __post_init__(self) -> None:
        if self.rounds is not None and self.rounds < 1:
            raise ValueError("a finite game value is at least one round")

    @property
    def breaker_wins(self) -> bool:
        return self.rounds is None

    def __str__(self) -> str:
        if self.rounds is None:
            return "BreakerWin"
        return f"{'Exact' if self.tightness is Tightness.EXACT else 'UpperBound'} {self.rounds}"


BREAKER_WIN = TauValue(None)

# Validity floors for round_bound, keyed by (family, a, k). Entries override
# the defaults of _n0_default, which were set by sweeping n upward against
# the breaker suite until every run met its bound.
N0: dict[tuple[str, int, int | None], int] = {}


def n0(kind: str, a: int, k: int | None = None) -> int:
    """Validity floor for ``round_bound``."""
    if (kind, a, k) in N0:
        return N0[(kind, a, k)]
    return _n0_default(kind, a, k)


def _n0_default(kind: str, a: int, k: int | None) -> int:
    if kind in ("pm", "ham"):
        return 8 * a
    return 2 * (k or 2) * a


def adjacency(n: int, edges: Iterable[Edge]) -> list[set[int]]:
    adj: list[set[int]] = [set() for _ in range(n)]
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    return adj


def _edge_count(adj: Adjacency) -> int:
    return sum(len(s) for s in adj) // 2


_KINDS = frozenset(kind.value for kind in GameKind)


def round_bound(family: Family | str, a: int, n: int, k: int | None = None, *, enforce_floor: bool = True) -> TauValue:
    """Round counts of the fast-win theorems for the (a:a) games on K_n."""
    if isinstance(family, Family):
        kind, k = family.kind.value, family.k if family.k is not None else k
    elif family in _KINDS:
        kind = family
    else:
        kind = GameKind(family).value
    if a < 1 or n < 2:
        raise InvalidConfig("need a >= 1 and n >= 2")
    if kind in ("pkf", "skf"):
        if k is None or k < 2 or n % k:
            raise InvalidConfig(f"k={k} must be at least 2 and divide n={n}")
        if k == 2:
            return round_bound("pm", a, n, enforce_floor=enforce_floor)
    if enforce_floor and n < n0(kind, a, k if kind in ("pkf", "skf") else None):
        raise OutOfValidity(f"n={n} is below the validity floor {n0(kind, a, k)} for {kind} with a={a}")
    if kind == "pm":
        if a == 1:
            # Prior-work values for a=1.
            return TauValue(n // 2 + 1 if n % 2 == 0 else (n + 1) // 2)
        c = -(-n // (2 * a))
        if (n - 1) % (2 * a) == 0:
            return TauValue(c - 1)
        return TauValue(c)
    if kind == "ham":
        if a == 1 or (a == 2 and n % 2 == 0):
            return TauValue(n // a + 1)
        return TauValue(-(-n // a))
    m = (k - 1) * n // k
    if kind == "pkf":
        return TauValue(-(-m // a))
    return TauValue(m // a + 1, Tightness.UPPER_BOUND)


def min_winning_edges(kind: str, n: int, k: int | None = None) -> int:
    """Edge count of the smallest winning set."""
    if kind == "pm":
        return n // 2
    if kind == "ham":
        return n
    return (k - 1) * n // k


# Perfect matchings ---------------------------------------------------------

def maximum_matching(adj: Adjacency) -> set[Edge]:
    g = nx.Graph()
    g.add_nodes_from(range(len(adj)))
    g.add_edges_from((u, v) for u in range(len(adj)) for v in adj[u] if u < v)
    return {(min(u, v), max(u, v)) for u, v in nx.max_weight_matching(g, maxcardinality=True)}


def contains_perfect_matching(adj: Adjacency) -> bool:
    n = len(adj)
    need = n // 2
    if _edge_count(adj) < need:
        return False
    if sum(1 for s in adj if not s) > n - 2 * need:
        return False
    return len(maximum_matching(adj)) >= need


# Hamilton cycles -----------------------------------------------------------

def _connected(adj: Adjacency) -> bool:
    n = len(adj)
    seen = {0}
    stack = [0]
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == n


def contains_hamilton_cycle(adj: Adjacency) -> bool:
    """Exact search with forced-edge propagation.

    A vertex of degree two forces both its edges; a vertex with two forced
    edges loses the rest; an edge closing a forced path early is removed.
    Branching chooses the two cycle edges at a vertex of least degree.
    """
    n = len(adj)
    if n < 3 or _edge_count(adj) < n:
        return False
    if any(len(s) < 2 for s in adj) or not _connected(adj):
        return False
    return _ham_search([set(s) for s in adj])


def _ham_search(g: list[set[int]]) -> bool:
    n = len(g)
    while True:
        forced: list[set[int]] = [set() for _ in range(n)]
        for v in range(n):
            if len(g[v]) < 2:
                return False
            if len(g[v]) == 2:
                for w in g[v]:
                    forced[v].add(w)
                    forced[w].add(v)
        changed = False
        for v in range(n):
            if len(forced[v]) > 2:
                return False
            if len(forced[v]) == 2 and len(g[v]) > 2:
                for w in g[v] - forced[v]:
                    g[w].discard(v)
                g[v] = set(forced[v])
                changed = True
        if changed:
            continue
        # Walk forced paths; detect forced cycles and premature closing edges.
        seen = [False] * n
        nforced = sum(len(f) for f in forced) // 2
        for s in range(n):
            if seen[s] or len(forced[s]) != 1:
                continue
            prev, cur, size = -1, s, 1
            seen[s] = True
            while True:
                nxt = [w for w in forced[cur] if w != prev]
                if not nxt:
                    break
                prev, cur = cur, nxt[0]
                seen[cur] = True
                size += 1
            if size < n and cur in g[s]:
                g[s].discard(cur)
                g[cur].discard(s)
                changed = True
        for s in range(n):
            if not seen[s] and len(forced[s]) == 2:
                # A vertex on a forced cycle.
                return nforced == n and _connected(forced)
        if changed:
            continue
        break
    if all(len(g[v]) == 2 for v in range(n)):
        return _connected(g)
    if not _connected(g):
        return False
    v = min((v for v in range(n) if len(g[v]) > 2), key=lambda x: (len(g[x]), x))
    fixed = forced[v]
    others = sorted(g[v] - fixed)
    if len(fixed) == 1:
        pairs = [(next(iter(fixed)), w) for w in others]
    else:
        pairs = [(others[i], others[j]) for i in range(len(others)) for j in range(i + 1, len(others))]
    for w1, w2 in pairs:
        h = [set(s) for s in g]
        for w in h[v] - {w1, w2}:
            h[w].discard(v)
        h[v] = {w1, w2}
        if _ham_search(h):
            return True
    return False


# Path and star factors -----------------------------------------------------

def _components(adj: Adjacency) -> list[list[int]]:
    n = len(adj)
    comp = [-1] * n
    out: list[list[int]] = []
    for s in range(n):
        if comp[s] >= 0:
            continue
        comp[s] = len(out)
        part = [s]
        stack = [s]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if comp[w] < 0:
                    comp[w] = comp[s]
                    part.append(w)
                    stack.append(w)
        out.append(sorted(part))
    return out


def _is_path_component(adj: Adjacency, part: list[int]) -> bool:
    edges = sum(len(adj[v]) for v in part) // 2
    return edges == len(part) - 1 and all(len(adj[v]) <= 2 for v in part)


def _path_sets(adj: Adjacency, v: int, free: frozenset[int], k: int) -> set[frozenset[int]]:
    """Vertex sets of k-vertex paths through v inside ``free``."""
    found: set[frozenset[int]] = set()

    def grow_left(path: list[int]) -> None:
        if len(path) == k:
            found.add(frozenset(path))
            return
        for w in adj[path[0]]:
            if w in free and w not in path:
                grow_left([w] + path)

    def grow_right(path: list[int]) -> None:
        grow_left(path)
        if len(path) == k:
            return
        for w in adj[path[-1]]:
            if w in free and w not in path:
                grow_right(path + [w])

    grow_right([v])
    return found


def _star_sets(adj: Adjacency, v: int, free: frozenset[int], k: int) -> set[frozenset[int]]:
    """Vertex sets of k-vertex stars containing v inside ``free``."""
    from itertools import combinations

    found: set[frozenset[int]] = set()
    centres = [v] + [c for c in adj[v] if c in free]
    for c in centres:
        nb = sorted(w for w in adj[c] if w in free)
        if c == v:
            for leaves in combinations(nb, k - 1):
                found.add(frozenset((c,) + leaves))
        else:
            rest = [w for w in nb if w != v]
            for leaves in combinations(rest, k - 2):
                found.add(frozenset((c, v) + leaves))
    return found


def _factor(adj: Adjacency, k: int, pieces) -> bool:
    n = len(adj)
    if n % k:
        return False
    for part in _components(adj):
        if len(part) % k:
            return False
    for part in _components(adj):
        if len(part) == 1 and k == 1:
            continue
        if pieces is _path_sets and _is_path_component(adj, part):
            continue
        if not _cover(adj, frozenset(part), k, pieces, {}):
            return False
    return True


def _cover(adj: Adjacency, free: frozenset[int], k: int, pieces, memo: dict) -> bool:
    if not free:
        return True
    if free in memo:
        return memo[free]
    v = min(free)
    ok = False
    for piece in pieces(adj, v, free, k):
        if _cover(adj, free - piece, k, pieces, memo):
            ok = True
            break
    memo[free] = ok
    return ok


def contains_path_factor(adj: Adjacency, k: int) -> bool:
    n = len(adj)
    if k < 1 or n % k:
        return False
    if k == 1:
        return True
    if _edge_count(adj) < n * (k - 1) // k or any(not s for s in adj):
        return False
    return _factor(adj, k, _path_sets)


def contains_star_factor(adj: Adjacency, k: int) -> bool:
    n = len(adj)
    if k < 1 or n % k:
        return False
    if k == 1:
        return True
    if _edge_count(adj) < n * (k - 1) // k or any(not s for s in adj):
        return False
    return _factor(adj, k, _star_sets)


def contains(family: Family, adj: Adjacency) -> bool:
    kind = family.kind
    if kind is GameKind.PM:
        return contains_perfect_matching(adj)
    if kind is GameKind.HAM:
        return contains_hamilton_cycle(adj)
    if kind is GameKind.PKF:
        return contains_path_factor(adj, family.k)
    return contains_star_factor(adj, family.k)


def is_win(family: Family, board: Board, side: int) -> bool:
    """Whether ``side`` has claimed a winning set; cheap counts first."""
    adj = board.adj[side]
    n = board.n
    m = board.counts[side]
    kind = family.kind
    if m < min_winning_edges(kind.value, n, family.k):
        return False
    if kind is GameKind.PM:
        isolated = sum(1 for s in adj if not s)
        if isolated > n % 2:
            return False
    elif kind is GameKind.HAM:
        if any(len(s) < 2 for s in adj):
            return False
    elif any(not s for s in adj):
        return False
    return contains(family, adj)
