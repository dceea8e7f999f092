"""Board, game state, turn alternation and transcripts.

Vertices are integers ``0..n-1``. Edges are tuples ``(u, v)`` with ``u < v``.
On a bipartite board the left side is ``0..n/2-1`` and the right side is
``n/2..n-1``.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Protocol

from .errors import (
    CorruptTranscript,
    IllegalStep,
    InvalidConfig,
    InvalidHandicap,
    StrategyFailure,
)

Edge = tuple[int, int]


def norm(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


class Player(Enum):
    MAKER = "maker"
    BREAKER = "breaker"
    RED = "red"
    BLUE = "blue"

    @property
    def side(self) -> int:
        """0 for the Maker-like player, 1 for the Breaker-like player."""
        return 0 if self in (Player.MAKER, Player.RED) else 1


class Mode(Enum):
    MAKER_BREAKER = "maker-breaker"
    STRONG = "strong"


class GameKind(Enum):
    PM = "pm"
    HAM = "ham"
    PKF = "pkf"
    SKF = "skf"


@dataclass(frozen=True)
class Family:
    kind: GameKind
    k: int | None = None

    @classmethod
    def parse(cls, name: str, k: int | None = None) -> Family:
        kind = GameKind(name)
        if kind in (GameKind.PKF, GameKind.SKF):
            if k is None:
                raise InvalidConfig(f"family {name} needs k")
            return cls(kind, k)
        return cls(kind, None)

    def __str__(self) -> str:
        return self.kind.value if self.k is None else f"{self.kind.value}(k={self.k})"


@dataclass(frozen=True)
class GameConfig:
    family: Family
    n: int
    a: int
    b: int | None = None
    first: Player | None = None
    mode: Mode = Mode.MAKER_BREAKER
    board: str = "kn"
    seed: int = 0

    def __post_init__(self) -> None:
        if self.b is None:
            object.__setattr__(self, "b", self.a)
        if self.first is None:
            first = Player.RED if self.mode is Mode.STRONG else Player.BREAKER
            object.__setattr__(self, "first", first)
        self.validate()

    def validate(self) -> None:
        if self.a < 1 or self.b < 1:
            raise InvalidConfig("biases must be positive")
        if self.n < 2:
            raise InvalidConfig("need at least two vertices")
        if self.board not in ("kn", "bip"):
            raise InvalidConfig(f"unknown board kind {self.board!r}")
        if self.board == "bip" and self.n % 2:
            raise InvalidConfig("bipartite boards have n/2 vertices per side")
        k = self.family.k
        if self.family.kind in (GameKind.PKF, GameKind.SKF):
            if k is None or k < 2:
                raise InvalidConfig("factor games need k >= 2")
            if self.n % k:
                raise InvalidConfig(f"k={k} does not divide n={self.n}")
        strong = self.mode is Mode.STRONG
        if strong != (self.first in (Player.RED, Player.BLUE)):
            raise InvalidConfig("Red/Blue play strong games, Maker/Breaker the others")

    @property
    def players(self) -> tuple[Player, Player]:
        """(maker-side player, breaker-side player)."""
        if self.mode is Mode.STRONG:
            return Player.RED, Player.BLUE
        return Player.MAKER, Player.BREAKER

    def bias(self, player: Player) -> int:
        return self.a if player.side == 0 else self.b

    def to_json(self) -> dict:
        d = {
            "family": self.family.kind.value,
            "n": self.n,
            "a": self.a,
            "b": self.b,
            "first": self.first.value,
            "mode": self.mode.value,
            "board": self.board,
            "seed": self.seed,
        }
        if self.family.k is not None:
            d["k"] = self.family.k
        return d

    @classmethod
    def from_json(cls, d: dict) -> GameConfig:
        return cls(
            family=Family.parse(d["family"], d.get("k")),
            n=int(d["n"]),
            a=int(d["a"]),
            b=int(d["b"]),
            first=Player(d["first"]),
            mode=Mode(d["mode"]),
            board=d.get("board", "kn"),
            seed=int(d.get("seed", 0)),
        )


class Board:
    """Edge ownership over K_n or a balanced K_{n/2,n/2}.

    Only claimed edges are stored; everything else is free.
    """

    def __init__(self, n: int, kind: str = "kn"):
        self.n = n
        self.kind = kind
        self.left = n // 2 if kind == "bip" else n
        self.owner: dict[Edge, int] = {}
        self.adj: tuple[list[set[int]], list[set[int]]] = (
            [set() for _ in range(n)],
            [set() for _ in range(n)],
        )
        self.counts = [0, 0]

    @property
    def total_edges(self) -> int:
        if self.kind == "bip":
            return self.left * (self.n - self.left)
        return self.n * (self.n - 1) // 2

    @property
    def free_count(self) -> int:
        return self.total_edges - self.counts[0] - self.counts[1]

    def is_edge(self, u: int, v: int) -> bool:
        if u == v or not (0 <= u < self.n and 0 <= v < self.n):
            return False
        if self.kind == "bip":
            return (u < self.left) != (v < self.left)
        return True

    def is_free(self, u: int, v: int) -> bool:
        return self.is_edge(u, v) and norm(u, v) not in self.owner

    def owner_of(self, u: int, v: int) -> int | None:
        return self.owner.get(norm(u, v))

    def deg(self, side: int, v: int) -> int:
        return len(self.adj[side][v])

    def neighbours(self, v: int) -> Iterator[int]:
        """All board neighbours of v in ascending order."""
        if self.kind == "bip":
            rng = range(self.left, self.n) if v < self.left else range(self.left)
            return iter(rng)
        return (w for w in range(self.n) if w != v)

    def free_neighbours(self, v: int) -> Iterator[int]:
        a0, a1 = self.adj[0][v], self.adj[1][v]
        return (w for w in self.neighbours(v) if w not in a0 and w not in a1)

    def claim(self, u: int, v: int, side: int) -> None:
        e = norm(u, v)
        if not self.is_edge(u, v):
            raise IllegalStep(f"{e} is not an edge of the board")
        if e in self.owner:
            raise IllegalStep(f"{e} is already claimed")
        self.owner[e] = side
        self.adj[side][u].add(v)
        self.adj[side][v].add(u)
        self.counts[side] += 1

    def edges(self, side: int) -> list[Edge]:
        return sorted(e for e, s in self.owner.items() if s == side)

    def free_edges(self) -> Iterator[Edge]:
        for u in range(self.n):
            for v in self.neighbours(u):
                if v > u and (u, v) not in self.owner:
                    yield (u, v)

    def random_free_edge(self, rng: random.Random) -> Edge | None:
        free = self.free_count
        if free <= 0:
            return None
        if free * 4 < self.total_edges:
            return rng.choice(list(self.free_edges()))
        while True:
            if self.kind == "bip":
                u = rng.randrange(self.left)
                v = rng.randrange(self.left, self.n)
            else:
                u, v = rng.sample(range(self.n), 2)
            e = norm(u, v)
            if e not in self.owner:
                return e

    def copy(self) -> Board:
        other = Board(self.n, self.kind)
        for (u, v), s in self.owner.items():
            other.claim(u, v, s)
        return other

    def recount_ok(self) -> bool:
        """Degree tables agree with a recount from the ownership map."""
        deg = [[0] * self.n, [0] * self.n]
        for (u, v), s in self.owner.items():
            deg[s][u] += 1
            deg[s][v] += 1
        return all(
            deg[s][v] == len(self.adj[s][v]) for s in (0, 1) for v in range(self.n)
        ) and self.counts == [sum(deg[0]) // 2, sum(deg[1]) // 2]


@dataclass
class MoveRecord:
    player: Player
    round: int
    edges: list[Edge]


@dataclass
class GameState:
    board: Board
    config: GameConfig
    handicap: list[Edge]
    to_move: Player
    round: int = 1
    steps_in_move: int = 0
    moves_made: dict[Player, int] = field(default_factory=dict)
    finished: Player | str | None = None
    moves: list[MoveRecord] = field(default_factory=list)

    @property
    def maker_moves_used(self) -> int:
        return self.moves_made.get(self.config.players[0], 0)

    @property
    def winner(self) -> str | None:
        if self.finished is None:
            return None
        return self.finished.value if isinstance(self.finished, Player) else self.finished


def new_game(config: GameConfig, handicap: Iterable[Edge] = (), max_handicap: int | None = None) -> GameState:
    board = Board(config.n, config.board)
    hcap: list[Edge] = []
    for raw in handicap:
        u, v = raw
        e = norm(int(u), int(v))
        if not board.is_edge(*e) or e in board.owner:
            raise InvalidHandicap(f"bad handicap edge {raw}")
        board.claim(*e, 1)
        hcap.append(e)
    if max_handicap is not None and len(hcap) > max_handicap:
        raise InvalidHandicap(f"handicap has {len(hcap)} > {max_handicap} edges")
    return GameState(board=board, config=config, handicap=hcap, to_move=config.first)


def _other(config: GameConfig, p: Player) -> Player:
    m, b = config.players
    return b if p is m else m


def _wins(state: GameState, side: int) -> bool:
    from .winset import is_win

    return is_win(state.config.family, state.board, side)


def apply_step(state: GameState, player: Player, edge: Edge) -> GameState:
    """Claim one edge for ``player``; mutates and returns ``state``."""
    if state.finished is not None:
        raise IllegalStep("game already finished")
    if player is not state.to_move:
        raise IllegalStep(f"{player.value} tried to move, {state.to_move.value} is to move")
    cfg = state.config
    bias = cfg.bias(player)
    if state.steps_in_move >= bias:
        raise IllegalStep("bias exceeded")
    u, v = edge
    state.board.claim(int(u), int(v), player.side)
    e = norm(int(u), int(v))
    if state.steps_in_move == 0:
        state.moves_made[player] = state.moves_made.get(player, 0) + 1
        state.moves.append(MoveRecord(player, state.moves_made[player], []))
    state.moves[-1].edges.append(e)
    state.steps_in_move += 1
    check = player.side == 0 or cfg.mode is Mode.STRONG
    if check and _wins(state, player.side):
        state.finished = player
        return state
    if state.board.free_count == 0:
        state.finished = Player.BREAKER if cfg.mode is Mode.MAKER_BREAKER else "draw"
        return state
    if state.steps_in_move == bias:
        end_move(state)
    return state


def end_move(state: GameState) -> None:
    state.steps_in_move = 0
    nxt = _other(state.config, state.to_move)
    if nxt is state.config.first:
        state.round += 1
    state.to_move = nxt


class Strategy(Protocol):
    name: str

    def start(self, state: GameState, role: Player, rng: random.Random) -> None: ...

    def next_move(self, state: GameState) -> list[Edge]: ...


@dataclass
class Transcript:
    config: GameConfig
    handicap: list[Edge]
    moves: list[MoveRecord]
    winner: str | None
    maker_moves_used: int
    invariant_report: dict[str, str] = field(default_factory=dict)

    @property
    def seed(self) -> int:
        return self.config.seed

    @property
    def passed(self) -> bool:
        return all(v == "pass" for v in self.invariant_report.values())

    def to_json(self) -> dict:
        cfg = self.config.to_json()
        cfg["handicap"] = [list(e) for e in self.handicap]
        return {
            "config": cfg,
            "moves": [
                {"player": m.player.value, "round": m.round, "edges": [list(e) for e in m.edges]}
                for m in self.moves
            ],
            "winner": self.winner,
            "maker_moves_used": self.maker_moves_used,
            "invariant_report": dict(sorted(self.invariant_report.items())),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=False)

    @classmethod
    def from_json(cls, d: dict) -> Transcript:
        try:
            cfg = GameConfig.from_json(d["config"])
            hcap = [norm(int(u), int(v)) for u, v in d["config"].get("handicap", [])]
            moves = [
                MoveRecord(Player(m["player"]), int(m["round"]), [(int(u), int(v)) for u, v in m["edges"]])
                for m in d["moves"]
            ]
            return cls(
                config=cfg,
                handicap=hcap,
                moves=moves,
                winner=d.get("winner"),
                maker_moves_used=int(d.get("maker_moves_used", 0)),
                invariant_report=dict(d.get("invariant_report", {})),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise CorruptTranscript(f"malformed transcript: {exc}") from exc

    @classmethod
    def loads(cls, text: str) -> Transcript:
        try:
            return cls.from_json(json.loads(text))
        except json.JSONDecodeError as exc:
            raise CorruptTranscript(f"not JSON: {exc}") from exc


def _transcript(state: GameState, report: dict[str, str]) -> Transcript:
    return Transcript(
        config=state.config,
        handicap=list(state.handicap),
        moves=[MoveRecord(m.player, m.round, list(m.edges)) for m in state.moves],
        winner=state.winner,
        maker_moves_used=state.maker_moves_used,
        invariant_report=report,
    )


def player_rng(seed: int, role: Player) -> random.Random:
    return random.Random(f"{seed}:{role.value}")


def play(
    maker: Strategy,
    breaker: Strategy,
    config: GameConfig,
    handicap: Iterable[Edge] = (),
    *,
    max_handicap: int | None = None,
    observer=None,
) -> Transcript:
    """Run a full game and return its transcript.

    ``observer(state)`` is called after every completed move; it is used by
    the acceptance suite to check per-instant properties.
    """
    state = new_game(config, handicap, max_handicap)
    mp, bp = config.players
    strategies = {mp: maker, bp: breaker}
    engine_checks = {"engine.conservation": True, "engine.bias_discipline": True}
    for role, strat in strategies.items():
        try:
            strat.start(state, role, player_rng(config.seed, role))
        except StrategyFailure as exc:
            exc.transcript = _transcript(state, {})
            raise

    def report() -> dict[str, str]:
        out: dict[str, str] = {}
        for strat in (maker, breaker):
            log = getattr(strat, "log", None)
            if log is not None:
                out.update(log.report())
        ok_recount = state.board.recount_ok()
        out["engine.degree_recount"] = "pass" if ok_recount else "fail"
        for k, v in engine_checks.items():
            out[k] = "pass" if v else "fail"
        return out

    while state.finished is None:
        player = state.to_move
        bias = config.bias(player)
        try:
            edges = strategies[player].next_move(state)
        except StrategyFailure as exc:
            exc.transcript = _transcript(state, report())
            raise
        for e in edges:
            if state.finished is not None or state.to_move is not player:
                break
            try:
                apply_step(state, player, e)
            except IllegalStep as exc:
                failure = StrategyFailure(f"{strategies[player].name} played an illegal edge {e}: {exc}")
                failure.transcript = _transcript(state, report())
                raise failure from exc
            b = state.board
            if b.counts[0] + b.counts[1] + b.free_count != b.total_edges:
                engine_checks["engine.conservation"] = False
        if state.finished is None and state.to_move is player:
            msg = f"{strategies[player].name} returned {len(edges)} of {bias} edges without winning"
            failure = StrategyFailure(msg)
            failure.transcript = _transcript(state, report())
            raise failure
        if state.moves and state.finished is None and len(state.moves[-1].edges) != bias:
            engine_checks["engine.bias_discipline"] = False
        if observer is not None:
            observer(state)
    return _transcript(state, report())


def replay(transcript: Transcript) -> GameState:
    """Rebuild the game from a transcript, re-validating every step."""
    cfg = transcript.config
    try:
        state = new_game(cfg, transcript.handicap)
    except (InvalidHandicap, InvalidConfig) as exc:
        raise CorruptTranscript(str(exc)) from exc
    for idx, rec in enumerate(transcript.moves):
        if state.finished is not None:
            raise CorruptTranscript(f"move {idx} recorded after the game ended")
        if rec.player is not state.to_move:
            raise CorruptTranscript(f"move {idx}: {rec.player.value} out of turn")
        if rec.round != state.moves_made.get(rec.player, 0) + 1:
            raise CorruptTranscript(f"move {idx}: wrong round index {rec.round}")
        if not rec.edges:
            raise CorruptTranscript(f"move {idx} is empty")
        for e in rec.edges:
            if state.finished is not None:
                raise CorruptTranscript(f"move {idx} continues after the game ended")
            try:
                apply_step(state, rec.player, e)
            except IllegalStep as exc:
                raise CorruptTranscript(f"move {idx}: {exc}") from exc
        last = idx == len(transcript.moves) - 1
        if state.finished is None and state.to_move is rec.player and not last:
            raise CorruptTranscript(f"move {idx} is short")
        if state.finished is None and state.to_move is rec.player:
            # Truncated inside a move: close it so the state is consistent.
            end_move(state)
    return state


def verify(transcript: Transcript) -> GameState:
    """Replay and check the declared winner and move count."""
    state = replay(transcript)
    if state.winner != transcript.winner:
        raise CorruptTranscript(f"declared winner {transcript.winner}, replay gives {state.winner}")
    if state.maker_moves_used != transcript.maker_moves_used:
        raise CorruptTranscript(
            f"declared {transcript.maker_moves_used} maker moves, replay gives {state.maker_moves_used}"
        )
    return state
