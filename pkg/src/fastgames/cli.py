"""Command-line front end: simulate, batch, solve, play and replay.

Exit codes: 0 success, 1 a game finished but missed its contract (wrong
winner, bound exceeded or a failed invariant), 2 invalid flags or input
outside validity/solver limits, 3 strategy failure, 4 corrupt transcript.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .breakers import BREAKERS, make_breaker
from .engine import Board, Edge, Family, GameConfig, GameState, Mode, Player, Transcript, norm, play, verify
from .errors import CorruptTranscript, FastGamesError, InvalidConfig, LimitExceeded, OutOfValidity, StrategyFailure
from .solver import SolveLimits, best_move, solve_tau
from .strategies import DEFAULT_MAKER, MAKERS, make_maker
from .strategies.common import BaseStrategy
from .winset import round_bound

EXIT_OK, EXIT_CONTRACT, EXIT_USAGE, EXIT_STRATEGY, EXIT_CORRUPT = 0, 1, 2, 3, 4

CSV_HEADER = ["game", "n", "k", "a", "breaker", "seed", "winner", "maker_moves", "bound", "within_bound", "invariants"]


class UsageError(Exception):
    pass


# shared helpers ----------------------------------------------------------------


def build_config(game: str, n: int, a: int, b: int | None, k: int | None, seed: int, strong: bool, board: str = "kn") -> GameConfig:
    family = Family.parse(game, k)
    mode = Mode.STRONG if strong else Mode.MAKER_BREAKER
    return GameConfig(family, n, a, b, mode=mode, board=board, seed=seed)


def default_maker(game: str, strong: bool) -> str:
    if strong and game == "ham":
        return "red"
    return DEFAULT_MAKER[game]


def bound_for(cfg: GameConfig) -> int | None:
    """Closed-form round bound, or None when biases differ or n is off the table."""
    if cfg.a != cfg.b:
        return None
    return round_bound(cfg.family, cfg.a, cfg.n).rounds


def contract_ok(tr: Transcript, bound: int | None) -> bool:
    maker_side = tr.config.players[0].value
    if tr.winner != maker_side:
        return False
    return bound is None or tr.maker_moves_used <= bound


def _write(path: str | None, text: str) -> None:
    if path:
        Path(path).write_text(text)


# simulate ------------------------------------------------------------------------


def cmd_simulate(args: argparse.Namespace, out) -> int:
    try:
        cfg = build_config(args.game, args.n, args.a, args.b, args.k, args.seed, args.strong, args.board)
        bound = bound_for(cfg)
        maker = make_maker(args.maker or default_maker(args.game, args.strong))
        breaker = make_breaker(args.breaker)
    except (InvalidConfig, OutOfValidity, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        tr = play(maker, breaker, cfg)
    except StrategyFailure as exc:
        if exc.transcript is not None:
            _write(args.out, exc.transcript.dumps())
        print(f"strategy failure: {exc}", file=sys.stderr)
        return EXIT_STRATEGY
    _write(args.out, tr.dumps())
    inv = "pass" if tr.passed else "fail"
    print(f"winner={tr.winner} maker_moves={tr.maker_moves_used} bound={bound if bound is not None else 'n/a'} invariants={inv}", file=out)
    if not tr.passed:
        for name, v in sorted(tr.invariant_report.items()):
            if v != "pass":
                print(f"  failed: {name}", file=out)
    return EXIT_OK if contract_ok(tr, bound) and tr.passed else EXIT_CONTRACT


# batch ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Job:
    game: str
    n: int
    k: int | None
    a: int
    breaker: str
    seed: int
    maker: str
    strong: bool


def run_job(job: Job) -> list[str]:
    cfg = build_config(job.game, job.n, job.a, None, job.k, job.seed, job.strong)
    bound = bound_for(cfg)
    row = [job.game, str(job.n), "" if job.k is None else str(job.k), str(job.a), job.breaker, str(job.seed)]
    try:
        tr = play(make_maker(job.maker), make_breaker(job.breaker), cfg)
    except StrategyFailure:
        return row + ["error", "", str(bound), "false", "fail"]
    within = contract_ok(tr, bound)
    return row + [
        str(tr.winner),
        str(tr.maker_moves_used),
        str(bound),
        "true" if within else "false",
        "pass" if tr.passed else "fail",
    ]


def parse_range(text: str) -> list[int]:
    try:
        parts = [int(x) for x in text.split(":")]
    except ValueError:
        raise UsageError(f"bad range {text!r}; use LO:HI[:STEP]") from None
    if len(parts) == 2:
        parts.append(1)
    if len(parts) != 3 or parts[2] <= 0:
        raise UsageError(f"bad range {text!r}; use LO:HI[:STEP] with STEP > 0")
    lo, hi, step = parts
    return list(range(lo, hi + 1, step))


def parse_list(text: str, conv=str) -> list:
    try:
        return [conv(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"bad list {text!r}") from None


def batch_jobs(args: argparse.Namespace) -> list[Job]:
    ns = parse_range(args.n_range)
    if not ns:
        raise UsageError("empty n range")
    a_list = parse_list(args.a_list, int)
    breakers = parse_list(args.breakers)
    for b in breakers:
        if b not in BREAKERS:
            raise UsageError(f"unknown breaker {b!r}")
    if not a_list or not breakers or args.runs < 1:
        raise UsageError("need at least one bias, one breaker and one run")
    maker = args.maker or default_maker(args.game, args.strong)
    jobs = []
    for n in ns:
        for a in a_list:
            try:
                cfg = build_config(args.game, n, a, None, args.k, args.seed, args.strong)
                bound_for(cfg)
            except (InvalidConfig, OutOfValidity) as exc:
                print(f"skipping n={n} a={a}: {exc}", file=sys.stderr)
                continue
            for br in breakers:
                for r in range(args.runs):
                    jobs.append(Job(args.game, n, args.k, a, br, args.seed + r, maker, args.strong))
    if not jobs:
        raise UsageError("no valid (n, a) combination in the sweep")
    return jobs


def cmd_batch(args: argparse.Namespace, out) -> int:
    try:
        jobs = batch_jobs(args)
    except (UsageError, InvalidConfig, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(run_job, jobs, chunksize=4))
    else:
        rows = [run_job(j) for j in jobs]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    w.writerows(rows)
    text = buf.getvalue()
    if args.out:
        Path(args.out).write_text(text)
    else:
        out.write(text)
    within = sum(1 for r in rows if r[9] == "true")
    print(f"within_bound={within}/{len(rows)} ({100.0 * within / len(rows):.1f}%)", file=out)
    return EXIT_OK if within == len(rows) else EXIT_CONTRACT


# solve ---------------------------------------------------------------------------


def cmd_solve(args: argparse.Namespace, out) -> int:
    try:
        board = Board(args.n, args.board)
        first = Player.MAKER if args.first == "maker" else Player.BREAKER
        limits = SolveLimits(max_edges=args.max_edges, max_states=args.max_states)
        value = solve_tau(board, args.game, args.a, args.b, first, limits, canonical=args.canonical, k=args.k)
        print(str(value), file=out)
        if args.hint:
            move = best_move(board, args.game, args.a, args.b, first, limits, k=args.k)
            print("best move: " + " ".join(f"{u}-{v}" for u, v in move), file=out)
    except (InvalidConfig, LimitExceeded, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


# play ----------------------------------------------------------------------------


def parse_edge(text: str) -> Edge:
    for sep in ("-", ",", " "):
        if sep in text.strip():
            u, v = text.strip().split(sep, 1)
            return norm(int(u), int(v))
    raise ValueError(f"cannot read an edge from {text!r}; type u-v")


class HumanStrategy(BaseStrategy):
    """Reads the opponent's edges from a text stream, one per prompt."""

    name = "human"

    def __init__(self, stdin, stdout, game: str, k: int | None):
        super().__init__()
        self.stdin = stdin
        self.stdout = stdout
        self.game = game
        self.k = k

    def setup(self, state: GameState) -> None:
        self.bias = state.config.bias(self.role)

    def _hint(self, state: GameState) -> None:
        try:
            mv = best_move(state.board, self.game, state.config.a, state.config.b, self.role.side, k=self.k)
            print("hint: " + " ".join(f"{u}-{v}" for u, v in mv), file=self.stdout)
        except (LimitExceeded, InvalidConfig) as exc:
            print(f"no hint: {exc}", file=self.stdout)

    def next_move(self, state: GameState) -> list[Edge]:
        b = state.board
        mine: list[Edge] = []
        last = [e for rec in state.moves[-1:] for e in rec.edges]
        if last:
            print("opponent played " + " ".join(f"{u}-{v}" for u, v in last), file=self.stdout)
        while len(mine) < min(self.bias, b.free_count):
            print(f"your edge {len(mine) + 1}/{self.bias} (u-v, 'hint' or 'quit'): ", end="", file=self.stdout)
            self.stdout.flush()
            line = self.stdin.readline()
            if not line or line.strip() == "quit":
                raise StrategyFailure("human resigned")
            if line.strip() == "hint":
                self._hint(state)
                continue
            try:
                e = parse_edge(line)
            except ValueError as exc:
                print(str(exc), file=self.stdout)
                continue
            if not b.is_edge(*e) or not b.is_free(*e) or e in mine:
                print(f"edge {e[0]}-{e[1]} is not available; try again", file=self.stdout)
                continue
            mine.append(e)
        return mine


def cmd_play(args: argparse.Namespace, out, stdin=None) -> int:
    stdin = stdin or sys.stdin
    try:
        cfg = build_config(args.game, args.n, args.a, args.b, args.k, args.seed, args.strong, args.board)
        maker = make_maker(args.maker or default_maker(args.game, args.strong))
    except (InvalidConfig, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    human = HumanStrategy(stdin, out, args.game, args.k)
    try:
        tr = play(maker, human, cfg)
    except StrategyFailure as exc:
        if exc.transcript is not None:
            _write(args.out, exc.transcript.dumps())
        print(f"game stopped: {exc}", file=out)
        return EXIT_STRATEGY
    _write(args.out, tr.dumps())
    print(f"winner={tr.winner} maker_moves={tr.maker_moves_used}", file=out)
    return EXIT_OK


# replay --------------------------------------------------------------------------


def cmd_replay(args: argparse.Namespace, out) -> int:
    try:
        tr = Transcript.loads(Path(args.transcript).read_text())
        verify(tr)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CorruptTranscript as exc:
        print(f"corrupt transcript: {exc}", file=sys.stderr)
        return EXIT_CORRUPT
    print(f"winner={tr.winner} maker_moves={tr.maker_moves_used} replay=ok", file=out)
    for name, v in sorted(tr.invariant_report.items()):
        print(f"  {name}: {v}", file=out)
    return EXIT_OK


# parser --------------------------------------------------------------------------


def _game_flags(p: argparse.ArgumentParser, *, need_breaker: bool) -> None:
    p.add_argument("--game", required=True, choices=["pm", "ham", "pkf", "skf"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--b", type=int, default=None)
    p.add_argument("--maker", choices=sorted(MAKERS) + ["first"], default=None)
    if need_breaker:
        p.add_argument("--breaker", choices=sorted(BREAKERS), default="random")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--strong", action="store_true", help="strong game: the strategy plays Red and moves first")
    p.add_argument("--board", choices=["kn", "bip"], default="kn")
    p.add_argument("--out", default=None, help="transcript JSON path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fastgames", description="Fast Maker-Breaker strategies on graph edges.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="play one game and write its transcript")
    _game_flags(p, need_breaker=True)

    p = sub.add_parser("batch", help="sweep games and print CSV")
    p.add_argument("--game", required=True, choices=["pm", "ham", "pkf", "skf"])
    p.add_argument("--n-range", required=True, help="LO:HI[:STEP]")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--a-list", default="2")
    p.add_argument("--breakers", default="random")
    p.add_argument("--maker", choices=sorted(MAKERS) + ["first"], default=None)
    p.add_argument("--runs", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--strong", action="store_true")
    p.add_argument("--out", default=None, help="CSV path (default stdout)")

    p = sub.add_parser("solve", help="exact tau on a tiny board")
    p.add_argument("--board", choices=["kn", "bip"], default="kn")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--game", required=True, choices=["pm", "ham", "pkf", "skf"])
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--b", type=int, default=None)
    p.add_argument("--first", choices=["maker", "breaker"], default="breaker")
    p.add_argument("--canonical", action="store_true", help="merge isomorphic positions (K_n, n <= 6)")
    p.add_argument("--max-edges", type=int, default=16)
    p.add_argument("--max-states", type=int, default=2_000_000)
    p.add_argument("--hint", action="store_true", help="also print an optimal first move")

    p = sub.add_parser("play", help="play against a strategy at the terminal")
    _game_flags(p, need_breaker=False)

    p = sub.add_parser("replay", help="re-validate a transcript")
    p.add_argument("transcript")
    return parser


def main(argv: list[str] | None = None, out=None, stdin=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handlers = {
        "simulate": cmd_simulate,
        "batch": cmd_batch,
        "solve": cmd_solve,
        "play": lambda a, o: cmd_play(a, o, stdin),
        "replay": cmd_replay,
    }
    try:
        return handlers[args.command](args, out)
    except FastGamesError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
