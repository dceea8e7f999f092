"""Path rotation, Hamilton-cycle completion, bipartite matching and
good/bad edge bookkeeping shared by the strategies."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Collection, Iterable, Protocol, Sequence

from .engine import Edge, norm
from .errors import DegreeConditionViolated

Path = list[int]


class GraphLike(Protocol):
    n: int

    def has(self, u: int, v: int) -> bool: ...

    def co_degree(self, v: int) -> int:
        """Degree of v in the complement graph."""
        ...


class ExplicitGraph:
    """A graph given by adjacency sets."""

    def __init__(self, adj: Sequence[Collection[int]]):
        self.n = len(adj)
        self.adj = adj

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Edge]) -> ExplicitGraph:
        adj: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            adj[u].add(v)
            adj[v].add(u)
        return cls(adj)

    def has(self, u: int, v: int) -> bool:
        return v in self.adj[u]

    def co_degree(self, v: int) -> int:
        return self.n - 1 - len(self.adj[v])


class ComplementGraph:
    """K_n minus a blocked graph, typically Breaker's graph."""

    def __init__(self, blocked: Sequence[Collection[int]]):
        self.n = len(blocked)
        self.blocked = blocked

    def has(self, u: int, v: int) -> bool:
        return u != v and v not in self.blocked[u]

    def co_degree(self, v: int) -> int:
        return len(self.blocked[v])


@dataclass
class Merge:
    path: Path
    added: list[Edge]
    removed: Edge | None


def path_edges(path: Path) -> list[Edge]:
    return [norm(path[i], path[i + 1]) for i in range(len(path) - 1)]


def is_path_in(path: Path, edges: set[Edge]) -> bool:
    if len(set(path)) != len(path):
        return False
    return all(e in edges for e in path_edges(path))


def _check_degree(G: GraphLike, verts: Iterable[int], limit: float, what: str) -> None:
    for v in verts:
        if G.co_degree(v) > limit:
            raise DegreeConditionViolated(
                f"{what}: vertex {v} misses {G.co_degree(v)} edges, allowed {limit:g}"
            )


def rotate_merge(P1: Path, P2: Path, G: GraphLike) -> Merge:
    """Merge two disjoint paths with one rotation of P1.

    With x1 the first vertex of P1 and x2 the first of P2, picks z on P1
    adjacent to x2 whose successor z+ is adjacent to x1, drops zz+ and adds
    x1z+ and x2z. The returned path runs from y1 (end of P1) to y2.
    """
    if set(P1) & set(P2):
        raise ValueError("paths are not disjoint")
    if len(P1) < len(P2):
        raise ValueError("P1 must be at least as long as P2")
    ends = {P1[0], P1[-1], P2[0], P2[-1]}
    _check_degree(G, ends, len(P1) / 2 - 1, "rotate_merge")
    x1, x2 = P1[0], P2[0]
    pos = {v: i for i, v in enumerate(P1)}
    candidates = []
    for i in range(len(P1) - 1):
        z, zp = P1[i], P1[i + 1]
        if G.has(x1, zp) and G.has(x2, z):
            candidates.append(z)
    if not candidates:
        raise DegreeConditionViolated("rotate_merge: S1- and S2 do not meet")
    proper = sorted(c for c in candidates if c != x1)
    z = proper[0] if proper else x1
    i = pos[z]
    zp = P1[i + 1]
    path = list(reversed(P1[i + 1 :])) + P1[: i + 1] + P2
    if z == x1:
        # x1z+ is already the path edge zz+: a plain join by x1x2.
        return Merge(list(reversed(P1)) + P2, [norm(x1, x2)], None)
    return Merge(path, [norm(x1, zp), norm(x2, z)], norm(z, zp))


def close_path(path: Path, G: GraphLike) -> list[Edge]:
    """At most two edges of G that, with the path, give a spanning cycle."""
    n = len(path)
    x, y = path[0], path[-1]
    _check_degree(G, (x, y), n - 1 - n / 2, "close_path")
    if G.has(x, y):
        return [norm(x, y)]
    for i in range(n - 1):
        if G.has(x, path[i + 1]) and G.has(path[i], y):
            return [norm(x, path[i + 1]), norm(path[i], y)]
    raise DegreeConditionViolated("close_path: no crossing pair")


def close_cycle(path: Path, closing: list[Edge]) -> list[int]:
    """Vertex order of the cycle produced by ``close_path``."""
    if len(closing) == 1:
        return list(path)
    x = path[0]
    for i in range(len(path) - 1):
        if norm(x, path[i + 1]) in closing and norm(path[i], path[-1]) in closing:
            return path[: i + 1] + list(reversed(path[i + 1 :]))
    raise ValueError("closing edges do not match the path")


@dataclass
class Completion:
    edges: list[Edge]
    cycle: list[int]
    removed: list[Edge] = field(default_factory=list)


def complete_hamilton(paths: Sequence[Path], G: GraphLike) -> Completion:
    """Edges E* with |E*| <= 2t closing t covering paths into a Hamilton cycle."""
    t = len(paths)
    n = sum(len(p) for p in paths)
    ends = {v for p in paths for v in (p[0], p[-1])}
    _check_degree(G, ends, n / (2 * t) - 1, "complete_hamilton")
    order = sorted(range(t), key=lambda i: -len(paths[i]))
    cur = list(paths[order[0]])
    added: list[Edge] = []
    removed: list[Edge] = []
    for i in order[1:]:
        merge = rotate_merge(cur, list(paths[i]), G)
        cur = merge.path
        added.extend(merge.added)
        if merge.removed is not None:
            removed.append(merge.removed)
    closing = close_path(cur, G)
    added.extend(closing)
    edges = list(dict.fromkeys(added))
    return Completion(edges, close_cycle(cur, closing), removed)


# Bipartite matching --------------------------------------------------------

def max_bipartite_matching(
    left: Sequence[int], right: Sequence[int], adj: dict[int, Collection[int]] | Sequence[Collection[int]]
) -> tuple[dict[int, int], set[int]]:
    """Augmenting-path maximum matching and a König vertex cover.

    ``adj[u]`` lists the right-side neighbours of left vertex u. Returns the
    matching as a left->right map and a cover of the same size.
    """
    right_set = set(right)
    match_l: dict[int, int] = {}
    match_r: dict[int, int] = {}

    def nbrs(u: int) -> list[int]:
        return sorted(w for w in adj[u] if w in right_set)

    def augment(u: int, seen: set[int]) -> bool:
        for w in nbrs(u):
            if w in seen:
                continue
            seen.add(w)
            if w not in match_r or augment(match_r[w], seen):
                match_l[u] = w
                match_r[w] = u
                return True
        return False

    for u in sorted(left):
        augment(u, set())
    # König: Z = vertices reachable from free left vertices by alternating paths.
    zl = {u for u in left if u not in match_l}
    zr: set[int] = set()
    queue = deque(zl)
    while queue:
        u = queue.popleft()
        for w in nbrs(u):
            if w not in zr:
                zr.add(w)
                m = match_r.get(w)
                if m is not None and m not in zl:
                    zl.add(m)
                    queue.append(m)
    cover = (set(left) - zl) | zr
    return match_l, cover


# Good / bad edges ----------------------------------------------------------

@dataclass
class BadEdgeStats:
    br: int
    bad: set[Edge]
    bad_degree: dict[int, int]

    def D(self, e: Edge) -> int:
        u, v = e
        return self.bad_degree.get(u, 0) + self.bad_degree.get(v, 0)


def endpoints(paths: Iterable[Path]) -> dict[int, int]:
    """Map each endpoint to the index of its path."""
    out: dict[int, int] = {}
    for i, p in enumerate(paths):
        out[p[0]] = i
        out[p[-1]] = i
    return out


def bad_edge_stats(paths: Sequence[Path], claimed: Sequence[Collection[int]]) -> BadEdgeStats:
    """Bad edges are claimed edges joining endpoints of different paths."""
    owner = endpoints(paths)
    bad: set[Edge] = set()
    deg: dict[int, int] = {}
    for u, i in owner.items():
        for w in claimed[u]:
            j = owner.get(w)
            if j is not None and j != i and u < w:
                bad.add((u, w))
                deg[u] = deg.get(u, 0) + 1
                deg[w] = deg.get(w, 0) + 1
    return BadEdgeStats(len(bad), bad, deg)


def good_edges(paths: Sequence[Path], claimed: Sequence[Collection[int]], free=None) -> list[Edge]:
    """Free edges joining endpoints of different paths, in lexicographic order.

    ``free(u, v)`` decides freeness; by default an edge is free when it is not
    in ``claimed``.
    """
    owner = endpoints(paths)
    ends = sorted(owner)
    out = []
    for a_idx, u in enumerate(ends):
        for w in ends[a_idx + 1 :]:
            if owner[u] == owner[w]:
                continue
            ok = free(u, w) if free is not None else w not in claimed[u]
            if ok:
                out.append((u, w))
    return out


def at_most_one_bad_edge(paths: Sequence[Path], claimed: Sequence[Collection[int]], free=None) -> bool | None:
    """At most one bad edge when every endpoint has a good edge of D <= 1; None if that premise fails."""
    if len(paths) < 2:
        return None
    stats = bad_edge_stats(paths, claimed)
    good = good_edges(paths, claimed, free)
    touched = {v for e in good for v in e}
    if any(v not in touched for v in endpoints(paths)):
        return None
    if any(stats.D(e) > 1 for e in good):
        return None
    return stats.br <= 1


def linear_forest_paths(n: int, adj: Sequence[Collection[int]], vertices: Iterable[int] | None = None) -> list[Path] | None:
    """Decompose a graph into its paths, or None if it is not a linear forest."""
    verts = list(range(n)) if vertices is None else sorted(vertices)
    seen: set[int] = set()
    out: list[Path] = []
    for s in verts:
        if s in seen:
            continue
        if len(adj[s]) > 2:
            return None
        if len(adj[s]) == 2:
            continue
        path = [s]
        seen.add(s)
        prev, cur = -1, s
        while True:
            nxt = [w for w in adj[cur] if w != prev]
            if not nxt:
                break
            if len(adj[nxt[0]]) > 2 or nxt[0] in seen:
                return None
            prev, cur = cur, nxt[0]
            path.append(cur)
            seen.add(cur)
        out.append(path)
    if len(seen) != len(verts):
        return None
    return out


class PathCollection:
    """Maker's linear forest: disjoint paths with endpoint lookup.

    Single vertices are paths of length zero.
    """

    def __init__(self, paths: Iterable[Path]):
        self.paths: dict[int, Path] = {}
        self.end: dict[int, int] = {}
        self._next = 0
        for p in paths:
            self._add(list(p))

    @classmethod
    def from_graph(cls, n: int, adj: Sequence[Collection[int]], vertices: Iterable[int] | None = None) -> PathCollection:
        paths = linear_forest_paths(n, adj, vertices)
        if paths is None:
            raise ValueError("graph is not a linear forest")
        return cls(paths)

    def _add(self, p: Path) -> int:
        pid = self._next
        self._next += 1
        self.paths[pid] = p
        self.end[p[0]] = pid
        self.end[p[-1]] = pid
        return pid

    def _remove(self, pid: int) -> Path:
        p = self.paths.pop(pid)
        self.end.pop(p[0], None)
        self.end.pop(p[-1], None)
        return p

    def __len__(self) -> int:
        return len(self.paths)

    def path_of(self, v: int) -> Path:
        return self.paths[self.end[v]]

    def endpoints(self) -> list[int]:
        return sorted(self.end)

    def as_list(self) -> list[Path]:
        return [self.paths[k] for k in sorted(self.paths)]

    def join(self, u: int, w: int) -> Path:
        """Merge the paths ending at u and w by the edge uw."""
        i, j = self.end[u], self.end[w]
        if i == j:
            raise ValueError("u and w lie on the same path")
        A = self._remove(i)
        B = self._remove(j)
        if A[-1] != u:
            A.reverse()
        if B[0] != w:
            B.reverse()
        new = A + B
        self._add(new)
        return new

    def copy(self) -> PathCollection:
        return PathCollection(list(p) for p in self.as_list())
