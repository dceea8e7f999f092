from __future__ import annotations

import itertools

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fastgames.engine import Family
from fastgames.errors import InvalidConfig, OutOfValidity
from fastgames.winset import (
    BREAKER_WIN,
    TauValue,
    Tightness,
    adjacency,
    contains,
    contains_hamilton_cycle,
    contains_path_factor,
    contains_perfect_matching,
    contains_star_factor,
    min_winning_edges,
    n0,
    round_bound,
)


@st.composite
def small_graphs(draw, lo=2, hi=8):
    n = draw(st.integers(lo, hi))
    pairs = list(itertools.combinations(range(n), 2))
    edges = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=len(pairs)))
    return n, edges


# brute-force oracles ------------------------------------------------------------


def brute_hamilton(n, edges):
    es = {frozenset(e) for e in edges}
    if n < 3:
        return False
    for perm in itertools.permutations(range(1, n)):
        cyc = (0, *perm)
        if all(frozenset((cyc[i], cyc[(i + 1) % n])) in es for i in range(n)):
            return True
    return False


def _spans(part, es, kind):
    if kind == "path":
        return any(
            all(frozenset((p[i], p[i + 1])) in es for i in range(len(p) - 1)) for p in itertools.permutations(part)
        )
    return any(all(frozenset((c, x)) in es for x in part if x != c) for c in part)


def brute_factor(n, edges, k, kind):
    if n % k:
        return False
    es = {frozenset(e) for e in edges}

    def cover(rest):
        if not rest:
            return True
        first, others = rest[0], rest[1:]
        for comb in itertools.combinations(others, k - 1):
            part = (first, *comb)
            if _spans(part, es, kind) and cover([v for v in others if v not in comb]):
                return True
        return False

    return cover(list(range(n)))


# round_bound ---------------------------------------------------------------------


@pytest.mark.parametrize(
    "family,a,n,k,expected",
    [
        ("pm", 2, 100, None, TauValue(25)),
        ("pm", 2, 101, None, TauValue(25)),
        ("ham", 3, 30, None, TauValue(10)),
        ("pkf", 2, 12, 3, TauValue(4)),
        ("skf", 2, 12, 3, TauValue(5, Tightness.UPPER_BOUND)),
    ],
)
def test_round_bound_examples(family, a, n, k, expected):
    assert round_bound(family, a, n, k) == expected


def test_round_bound_k2_is_pm():
    for n in (40, 41, 60):
        for a in (2, 3):
            if n % 2 == 0:
                assert round_bound("pkf", a, n, 2) == round_bound("pm", a, n)
                assert round_bound("skf", a, n, 2) == round_bound("pm", a, n)


def test_round_bound_refuses_small_n():
    with pytest.raises(OutOfValidity):
        round_bound("ham", 5, 10)
    assert round_bound("ham", 5, 10, enforce_floor=False) == TauValue(2)
    with pytest.raises(InvalidConfig):
        round_bound("pkf", 2, 13, 3)
    with pytest.raises(InvalidConfig):
        round_bound("pm", 0, 100)


def test_floors_cover_cli_example():
    assert n0("pkf", 2, 3) <= 12
    assert n0("ham", 5) > 10


@given(st.sampled_from(["pm", "ham", "pkf", "skf"]), st.integers(2, 6), st.integers(2, 400), st.integers(3, 6))
def test_round_bound_at_least_trivial_lower_bound(family, a, n, k):
    k = k if family in ("pkf", "skf") else None
    if k and n % k:
        n += k - n % k
    v = round_bound(family, a, n, k, enforce_floor=False)
    m = n if family != "pm" else n - n % 2
    need = min_winning_edges(family, m, k)
    assert v.rounds * a >= need


def test_tau_value_strings():
    assert str(BREAKER_WIN) == "BreakerWin"
    assert BREAKER_WIN.breaker_wins
    assert str(TauValue(3)) == "Exact 3"
    assert str(TauValue(3, Tightness.UPPER_BOUND)) == "UpperBound 3"


# detectors -----------------------------------------------------------------------


def test_detector_examples():
    assert contains_perfect_matching(adjacency(4, [(0, 1), (2, 3)]))
    assert contains_perfect_matching(adjacency(5, [(0, 1), (2, 3)]))
    assert not contains_perfect_matching(adjacency(4, [(0, 1), (1, 2)]))
    c5 = [(i, (i + 1) % 5) for i in range(5)]
    assert contains_hamilton_cycle(adjacency(5, c5))
    assert not contains_hamilton_cycle(adjacency(5, [(i, i + 1) for i in range(4)]))
    c6 = [(i, (i + 1) % 6) for i in range(6)] + [(0, 3)]
    assert contains_hamilton_cycle(adjacency(6, c6))
    assert contains_path_factor(adjacency(6, [(0, 1), (1, 2), (3, 4), (4, 5)]), 3)
    assert contains_star_factor(adjacency(6, [(0, 1), (0, 2), (3, 4), (3, 5)]), 3)
    assert contains_path_factor(adjacency(6, [(i, i + 1) for i in range(5)]), 3)


@settings(max_examples=200, deadline=None)
@given(small_graphs(2, 10))
def test_matching_matches_networkx(g):
    n, edges = g
    G = nx.Graph()
    G.add_nodes_from(range(n))
    G.add_edges_from(edges)
    size = len(nx.max_weight_matching(G, maxcardinality=True))
    assert contains_perfect_matching(adjacency(n, edges)) == (size == n // 2)


@settings(max_examples=200, deadline=None)
@given(small_graphs(3, 7))
def test_hamilton_matches_brute_force(g):
    n, edges = g
    assert contains_hamilton_cycle(adjacency(n, edges)) == brute_hamilton(n, edges)


@settings(max_examples=150, deadline=None)
@given(small_graphs(3, 9), st.integers(2, 4))
def test_factors_match_brute_force(g, k):
    n, edges = g
    if n % k:
        return
    adj = adjacency(n, edges)
    assert contains_path_factor(adj, k) == brute_factor(n, edges, k, "path")
    assert contains_star_factor(adj, k) == brute_factor(n, edges, k, "star")


@settings(max_examples=100, deadline=None)
@given(small_graphs(3, 9))
def test_p3_and_s3_factors_coincide(g):
    n, edges = g
    if n % 3:
        return
    adj = adjacency(n, edges)
    assert contains_path_factor(adj, 3) == contains_star_factor(adj, 3)


@settings(max_examples=150, deadline=None)
@given(small_graphs(3, 8), st.sampled_from(["pm", "ham", "pkf", "skf"]), st.data())
def test_detectors_are_monotone(g, family, data):
    n, edges = g
    k = 2 if family in ("pkf", "skf") and n % 3 else 3
    fam = Family.parse(family, k)
    pairs = [p for p in itertools.combinations(range(n), 2) if p not in set(edges)]
    if not pairs:
        return
    extra = data.draw(st.sampled_from(pairs))
    if contains(fam, adjacency(n, edges)):
        assert contains(fam, adjacency(n, edges + [extra]))
