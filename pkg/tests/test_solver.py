from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fastgames.engine import Board, Family, Player, norm
from fastgames.errors import LimitExceeded
from fastgames.solver import (
    SolveLimits,
    Solver,
    ToyGame,
    best_move,
    game_from_board,
    solve_game,
    solve_tau,
    winning_sets,
)
from fastgames.winset import BREAKER_WIN, TauValue, adjacency, contains

from fixtures import INF, brute, random_toy

def set_win(sets):
    return lambda mask: any(mask & w == w for w in sets)


def graph_win(board, family):
    edges = [(u, v) for u in range(board.n) for v in range(u + 1, board.n) if board.is_edge(u, v)]

    def win(mask):
        chosen = [edges[i] for i in range(len(edges)) if mask >> i & 1]
        return contains(family, adjacency(board.n, chosen))

    return edges, win


def as_tau(v):
    return BREAKER_WIN if v == INF else TauValue(int(v))


# documented examples and frozen values -------------------------------------------------


def test_single_set_examples():
    assert solve_game(ToyGame.from_sets(1, [[0]]), 1, 1, Player.MAKER) == TauValue(1)
    assert solve_game(ToyGame.from_sets(2, [[0, 1]]), 1, 1, Player.BREAKER) == BREAKER_WIN


@pytest.mark.parametrize(
    "n,family,a,b,first,expected",
    [
        (4, "pm", 1, 1, Player.BREAKER, BREAKER_WIN),
        (4, "pm", 1, 1, Player.MAKER, BREAKER_WIN),
        (4, "pm", 2, 2, Player.BREAKER, TauValue(1)),
        (5, "pm", 1, 1, Player.BREAKER, TauValue(2)),
        (5, "pm", 1, 1, Player.MAKER, TauValue(2)),
        (5, "ham", 2, 2, Player.BREAKER, BREAKER_WIN),
        (5, "ham", 2, 1, Player.BREAKER, TauValue(3)),
        (6, "pm", 2, 2, Player.BREAKER, TauValue(2)),
        (6, "pm", 1, 2, Player.BREAKER, BREAKER_WIN),
    ],
)
def test_frozen_values(n, family, a, b, first, expected):
    assert solve_tau(Board(n), family, a, b, first) == expected


def test_k4_pm_matches_unmemoized_tree():
    board = Board(4)
    fam = Family.parse("pm")
    edges, win = graph_win(board, fam)
    for a, b in itertools.product((1, 2), repeat=2):
        for first in (Player.MAKER, Player.BREAKER):
            side = first.side
            want = brute(win, len(edges), a, b, 0, 0, side, a if side == 0 else b)
            assert solve_tau(board, fam, a, b, first) == as_tau(want)


def test_k4_ham_and_bipartite_match_unmemoized_tree():
    for board, fam in ((Board(4), Family.parse("ham")), (Board(4, "bip"), Family.parse("pm"))):
        edges, win = graph_win(board, fam)
        for a, b in ((1, 1), (2, 1), (1, 2)):
            want = brute(win, len(edges), a, b, 0, 0, 1, b)
            assert solve_tau(board, fam, a, b, Player.BREAKER) == as_tau(want)


def test_odd_pm_sets_are_near_perfect_matchings():
    sets = winning_sets(Board(5), Family.parse("pm"))
    assert len(sets) == 15
    assert all(bin(s).count("1") == 2 for s in sets)


# random boards -------------------------------------------------------------------


def check_against_brute(game: ToyGame, a: int, b: int, side: int) -> None:
    win = set_win(game.winning)
    if win(game.maker):
        return
    want = brute(win, game.size, a, b, game.maker, game.breaker, side, a if side == 0 else b)
    got = Solver(game, a, b).solve(side)
    assert got == want


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**9), st.integers(1, 2), st.integers(1, 2), st.integers(0, 1))
def test_memoized_equals_brute_force(seed, a, b, side):
    check_against_brute(random_toy(random.Random(seed)), a, b, side)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**9), st.integers(1, 2), st.integers(1, 2))
def test_bias_monotonicity(seed, a, b):
    game = random_toy(random.Random(seed))
    if set_win(game.winning)(game.maker):
        return
    for side in (0, 1):
        base = Solver(game, a, b).solve(side)
        assert Solver(game, a + 1, b).solve(side) <= base
        assert Solver(game, a, b + 1).solve(side) >= base


def test_canonical_matches_plain():
    for n, fam, a, b in ((4, "pm", 1, 1), (5, "pm", 1, 1), (5, "ham", 2, 1), (5, "pm", 1, 2)):
        for first in (Player.MAKER, Player.BREAKER):
            plain = solve_tau(Board(n), fam, a, b, first)
            assert solve_tau(Board(n), fam, a, b, first, canonical=True) == plain


# best_move and limits ------------------------------------------------------------


def test_best_move_takes_the_last_edge():
    board = Board(4)
    board.claim(0, 1, 0)
    board.claim(0, 2, 1)
    move = best_move(board, "pm", 1, 1, Player.MAKER)
    assert move == [(2, 3)]


def test_symmetric_first_moves_keep_value():
    for a in (1, 2):
        game = game_from_board(Board(4), Family.parse("pm"))
        solver = Solver(game, a, a)
        base = solver.solve(0)
        for i in range(game.size):
            # one step of Maker's opening move spent on edge i
            v = solver.value(1 << i, 0, 0, a - 1) if a > 1 else 1 + solver.value(1 << i, 0, 1, a)
            assert v == base


def test_limits():
    with pytest.raises(LimitExceeded):
        solve_tau(Board(7), "pm", 1, 1)
    with pytest.raises(LimitExceeded):
        solve_tau(Board(6), "pm", 1, 1, limits=SolveLimits(max_states=50))
