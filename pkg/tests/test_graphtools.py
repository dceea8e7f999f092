from __future__ import annotations

import random

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fastgames.engine import norm
from fastgames.errors import DegreeConditionViolated
from fastgames.graphtools import (
    ComplementGraph,
    ExplicitGraph,
    PathCollection,
    bad_edge_stats,
    close_cycle,
    close_path,
    complete_hamilton,
    good_edges,
    is_path_in,
    linear_forest_paths,
    max_bipartite_matching,
    path_edges,
    at_most_one_bad_edge,
    rotate_merge,
)
from fastgames.winset import adjacency, contains_hamilton_cycle

from fixtures import brute_closings, brute_merges, rotation_fixture


def kn(n):
    return ComplementGraph([set() for _ in range(n)])


def test_single_hamilton_path_closes_with_at_most_two_edges():
    path = list(range(8))
    comp = complete_hamilton([path], kn(8))
    assert len(comp.edges) <= 2
    assert contains_hamilton_cycle(adjacency(8, path_edges(path) + comp.edges))


def test_two_paths_in_complete_graph():
    comp = complete_hamilton([[0, 1, 2, 3], [4, 5, 6]], kn(7))
    assert len(comp.edges) <= 4
    cyc = comp.cycle
    assert sorted(cyc) == list(range(7))


def test_rotate_merge_plain_join():
    m = rotate_merge([0, 1, 2], [3, 4], kn(5))
    assert is_path_in(m.path, set(path_edges([0, 1, 2]) + path_edges([3, 4])) | set(m.added) - {m.removed})
    assert m.path[0] == 2 and m.path[-1] == 4


def test_rotate_merge_uses_a_rotation_when_blocked():
    # x1=0 and x2=4 are not adjacent, so a path edge has to go.
    blocked = [set() for _ in range(7)]
    blocked[0].add(4)
    blocked[4].add(0)
    m = rotate_merge([0, 1, 2, 3], [4, 5, 6], ComplementGraph(blocked))
    assert m.removed is not None
    assert norm(0, 4) not in m.added
    assert sorted(m.path) == list(range(7))


def test_rotate_merge_rejects_bad_input():
    with pytest.raises(ValueError):
        rotate_merge([0, 1], [1, 2], kn(3))
    with pytest.raises(ValueError):
        rotate_merge([0], [1, 2], kn(3))
    blocked = [set() for _ in range(6)]
    for v in (1, 2, 3):
        blocked[0].add(v)
        blocked[v].add(0)
    with pytest.raises(DegreeConditionViolated):
        rotate_merge([0, 1, 2, 3], [4, 5], ComplementGraph(blocked))


def test_close_path_errors_below_degree_condition():
    # The path's ends see nothing but their path neighbours.
    n = 6
    blocked = [set() for _ in range(n)]
    for v in (2, 3, 4, 5):
        blocked[0].add(v)
        blocked[v].add(0)
    with pytest.raises(DegreeConditionViolated):
        close_path(list(range(n)), ComplementGraph(blocked))


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**9))
def test_complete_hamilton_on_random_fixtures(seed):
    fx = rotation_fixture(random.Random(seed))
    G = fx.G
    comp = complete_hamilton(fx.paths, G)
    t = len(fx.paths)
    assert len(comp.edges) <= 2 * t
    assert all(G.has(*e) for e in comp.edges)
    union = {e for p in fx.paths for e in path_edges(p)} | set(comp.edges)
    assert contains_hamilton_cycle(adjacency(fx.n, union))
    cyc = comp.cycle
    assert sorted(cyc) == list(range(fx.n))
    assert all(norm(cyc[i], cyc[(i + 1) % fx.n]) in union for i in range(fx.n))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**9))
def test_rotate_merge_agrees_with_exhaustive_search(seed):
    fx = rotation_fixture(random.Random(seed), 6, 12)
    if len(fx.paths) < 2:
        return
    P1, P2 = sorted(fx.paths, key=len, reverse=True)[:2]
    G = fx.G
    options = brute_merges(P1, P2, G)
    m = rotate_merge(P1, P2, G)
    assert (m.removed, frozenset(m.added)) in options


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**9))
def test_close_path_agrees_with_exhaustive_search(seed):
    rng = random.Random(seed)
    fx = rotation_fixture(rng, 6, 12)
    path = [v for p in fx.paths for v in p]
    G = ComplementGraph(fx.blocked)
    on_path = set(path_edges(path))
    for u in range(fx.n):
        fx.blocked[u] = {w for w in fx.blocked[u] if norm(u, w) not in on_path}
    closing = close_path(path, G)
    assert frozenset(closing) in brute_closings(path, G)
    cyc = close_cycle(path, closing)
    assert sorted(cyc) == sorted(path)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 9), st.integers(1, 9), st.integers(0, 10**9))
def test_bipartite_matching_is_maximum_with_konig_cover(nl, nr, seed):
    rng = random.Random(seed)
    left = list(range(nl))
    right = list(range(nl, nl + nr))
    adj = {u: {w for w in right if rng.random() < 0.35} for u in left}
    match, cover = max_bipartite_matching(left, right, adj)
    assert len(set(match.values())) == len(match)
    assert all(w in adj[u] for u, w in match.items())
    B = nx.Graph()
    B.add_nodes_from(left + right)
    B.add_edges_from((u, w) for u in left for w in adj[u])
    best = len(nx.bipartite.hopcroft_karp_matching(B, top_nodes=left)) // 2
    assert len(match) == best == len(cover)
    assert all(u in cover or w in cover for u in left for w in adj[u])


def test_bad_and_good_edges():
    paths = [[0, 1], [2, 3], [4, 5]]
    claimed = [set() for _ in range(6)]
    for u, v in ((1, 2), (0, 4)):
        claimed[u].add(v)
        claimed[v].add(u)
    stats = bad_edge_stats(paths, claimed)
    assert stats.br == 2 and stats.bad == {(1, 2), (0, 4)}
    assert stats.D((1, 4)) == 2
    good = good_edges(paths, claimed)
    assert (1, 2) not in good and (0, 1) not in good and (1, 3) in good


def test_at_most_one_bad_edge_predicate():
    paths = [[0, 1], [2, 3], [4, 5], [6, 7]]
    claimed = [set() for _ in range(8)]
    claimed[1].add(2)
    claimed[2].add(1)
    assert at_most_one_bad_edge(paths, claimed) is True
    assert at_most_one_bad_edge([[0, 1]], claimed) is None


def test_linear_forest_decomposition():
    adj = adjacency(6, [(0, 1), (1, 2), (4, 5)])
    paths = linear_forest_paths(6, adj)
    assert sorted(map(sorted, paths)) == [[0, 1, 2], [3], [4, 5]]
    assert linear_forest_paths(3, adjacency(3, [(0, 1), (1, 2), (0, 2)])) is None
    assert linear_forest_paths(4, adjacency(4, [(0, 1), (0, 2), (0, 3)])) is None


def test_path_collection_join():
    coll = PathCollection([[0, 1], [2, 3], [4]])
    joined = coll.join(1, 2)
    assert joined in ([0, 1, 2, 3], [3, 2, 1, 0])
    assert len(coll) == 2
    assert sorted(coll.endpoints()) == [0, 3, 4]


def test_explicit_graph_degrees():
    g = ExplicitGraph.from_edges(4, [(0, 1), (1, 2)])
    assert g.has(1, 0) and not g.has(0, 2)
    assert g.co_degree(1) == 1 and g.co_degree(3) == 3
