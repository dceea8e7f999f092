"""Random fixtures and brute-force checkers shared by the test modules."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from fastgames.engine import Edge, norm
from fastgames.graphtools import ComplementGraph, path_edges
from fastgames.solver import ToyGame

INF = float("inf")


@dataclass
class RotationFixture:
    n: int
    paths: list[list[int]]
    blocked: list[set[int]]

    @property
    def G(self) -> ComplementGraph:
        return ComplementGraph(self.blocked)


def rotation_fixture(rng: random.Random, n_lo: int = 6, n_hi: int = 40) -> RotationFixture:
    """t covering paths and a blocked graph with co-degree at most n/(2t) - 1 everywhere."""
    n = rng.randint(n_lo, n_hi)
    t = rng.randint(1, max(1, n // 6))
    order = list(range(n))
    rng.shuffle(order)
    cuts = sorted(rng.sample(range(1, n), t - 1))
    paths = [order[i:j] for i, j in zip([0, *cuts], [*cuts, n])]
    on_path = {e for p in paths for e in path_edges(p)}
    limit = int(n / (2 * t) - 1)
    blocked: list[set[int]] = [set() for _ in range(n)]
    pairs = [(u, v) for u, v in itertools.combinations(range(n), 2) if (u, v) not in on_path]
    rng.shuffle(pairs)
    for u, v in pairs[: rng.randint(0, n * max(limit, 0))]:
        if len(blocked[u]) < limit and len(blocked[v]) < limit:
            blocked[u].add(v)
            blocked[v].add(u)
    return RotationFixture(n, paths, blocked)


def is_spanning_path(n_vertices: set[int], edges: set[Edge]) -> tuple[int, int] | None:
    """Endpoints if ``edges`` form one path through exactly ``n_vertices``."""
    if len(edges) != len(n_vertices) - 1:
        return None
    deg = {v: 0 for v in n_vertices}
    adj: dict[int, list[int]] = {v: [] for v in n_vertices}
    for u, v in edges:
        if u not in deg or v not in deg:
            return None
        deg[u] += 1
        deg[v] += 1
        adj[u].append(v)
        adj[v].append(u)
    if any(d > 2 for d in deg.values()):
        return None
    ends = [v for v, d in deg.items() if d <= 1]
    if len(n_vertices) == 1:
        return (ends[0], ends[0])
    if len(ends) != 2:
        return None
    seen, stack = {ends[0]}, [ends[0]]
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return (ends[0], ends[1]) if seen == n_vertices else None


def brute_merges(P1: list[int], P2: list[int], G) -> set[tuple[Edge | None, frozenset[Edge]]]:
    """All (f, {e1, e2}) with f on P1 or absent and e1, e2 in G joining P1 and P2 into one path.

    The joined path must keep the far ends of the inputs: it runs from P1[-1] to P2[-1].
    """
    verts = set(P1) | set(P2)
    base = set(path_edges(P1)) | set(path_edges(P2))
    cand = [norm(u, v) for u, v in itertools.combinations(sorted(verts), 2) if G.has(u, v) and norm(u, v) not in base]
    out = set()
    want = {P1[-1], P2[-1]}
    for f in [None, *path_edges(P1)]:
        kept = base - {f} if f else base
        extra = 1 if f is None else 2
        for es in itertools.combinations(cand, extra):
            got = is_spanning_path(verts, kept | set(es))
            if got is not None and (set(got) == want or len(verts) <= 2):
                out.add((f, frozenset(es)))
    return out


def brute_closings(path: list[int], G) -> set[frozenset[Edge]]:
    """All sets of at most two G-edges closing the path into a spanning cycle."""
    n = len(path)
    base = set(path_edges(path))
    cand = [norm(u, v) for u, v in itertools.combinations(path, 2) if G.has(u, v) and norm(u, v) not in base]
    out = set()
    x, y = path[0], path[-1]
    if norm(x, y) in cand:
        out.add(frozenset([norm(x, y)]))
    for e1, e2 in itertools.combinations(cand, 2):
        # path minus one edge plus e1, e2 must be a Hamilton cycle
        for f in path_edges(path):
            edges = (base - {f}) | {e1, e2}
            deg = {}
            for u, v in edges:
                deg[u] = deg.get(u, 0) + 1
                deg[v] = deg.get(v, 0) + 1
            if len(edges) == n and all(deg.get(v) == 2 for v in path):
                rest = edges - {e1}
                if is_spanning_path(set(path), rest) is not None:
                    out.add(frozenset([e1, e2]))
    return out


# solver oracle -------------------------------------------------------------------


def brute(win, size, a, b, mk, bk, side, r):
    """Plain minimax, no memo and no pruning. ``win(mask)`` says Maker is done."""
    free = [i for i in range(size) if not (mk | bk) >> i & 1]
    if not free:
        return INF
    vals = []
    for i in free:
        bit = 1 << i
        if side == 0:
            m2 = mk | bit
            if win(m2):
                vals.append(1)
            elif r > 1 and len(free) > 1:
                vals.append(brute(win, size, a, b, m2, bk, 0, r - 1))
            else:
                vals.append(1 + brute(win, size, a, b, m2, bk, 1, b))
        else:
            b2 = bk | bit
            if r > 1 and len(free) > 1:
                vals.append(brute(win, size, a, b, mk, b2, 1, r - 1))
            else:
                vals.append(brute(win, size, a, b, mk, b2, 0, a))
    return min(vals) if side == 0 else max(vals)


def random_toy(rng: random.Random) -> ToyGame:
    size = rng.randint(1, 10)
    sets = []
    for _ in range(rng.randint(1, 4)):
        k = rng.randint(1, min(4, size))
        sets.append(rng.sample(range(size), k))
    pre = list(range(size))
    rng.shuffle(pre)
    # keep at most seven free elements so the plain tree stays small
    claimed = pre[: max(0, size - 7) + rng.randint(0, 2)]
    maker = [x for x in claimed if rng.random() < 0.5]
    breaker = [x for x in claimed if x not in maker]
    return ToyGame.from_sets(size, sets, maker=maker, breaker=breaker)
