from __future__ import annotations

import csv
import io
import itertools
import json

import pytest

from fastgames.cli import CSV_HEADER, main, parse_edge, parse_range


def run(*argv, stdin=None):
    out = io.StringIO()
    code = main(list(argv), out=out, stdin=stdin)
    return code, out.getvalue()


def test_simulate_pm(tmp_path):
    path = tmp_path / "t.json"
    code, out = run("simulate", "--game", "pm", "--n", "100", "--a", "2", "--breaker", "random", "--seed", "7", "--out", str(path))
    assert code == 0
    fields = dict(kv.split("=") for kv in out.split())
    assert fields["winner"] == "maker" and int(fields["maker_moves"]) <= 25
    assert fields["bound"] == "25" and fields["invariants"] == "pass"
    assert json.loads(path.read_text())["winner"] == "maker"


def test_simulate_pkf_small():
    code, out = run("simulate", "--game", "pkf", "--n", "12", "--k", "3", "--a", "2", "--breaker", "random", "--seed", "1")
    assert "maker_moves=4 " in out
    assert code in (0, 1)


def test_simulate_below_floor_exits_2(capsys):
    code, _ = run("simulate", "--game", "ham", "--n", "10", "--a", "5")
    assert code == 2
    assert "validity floor" in capsys.readouterr().err


def test_simulate_bad_flags_exit_2():
    assert run("simulate", "--game", "nope", "--n", "10", "--a", "1")[0] == 2
    assert run("simulate", "--game", "pkf", "--n", "12", "--a", "2")[0] == 2
    assert run("simulate", "--game", "pm", "--n", "40", "--a", "2", "--breaker", "nobody")[0] == 2


def test_simulate_strategy_failure_exit_3(tmp_path):
    path = tmp_path / "t.json"
    code, _ = run("simulate", "--game", "ham", "--n", "61", "--a", "2", "--strong", "--out", str(path))
    assert code == 3
    assert path.exists()


def test_simulate_is_byte_identical(tmp_path):
    outs = []
    for name in ("a.json", "b.json"):
        p = tmp_path / name
        run("simulate", "--game", "skf", "--n", "48", "--k", "4", "--a", "2", "--breaker", "max_degree", "--seed", "3", "--out", str(p))
        outs.append(p.read_bytes())
    assert outs[0] == outs[1]


def test_batch_csv_and_aggregate():
    args = ("batch", "--game", "pm", "--n-range", "40:60:20", "--a-list", "2,3", "--breakers", "random,max_degree", "--runs", "2", "--seed", "5")
    code, out = run(*args)
    assert code == 0
    lines = out.strip().splitlines()
    rows = list(csv.reader(lines[:-1]))
    assert rows[0] == CSV_HEADER
    assert len(rows) == 1 + 2 * 2 * 2 * 2
    assert all(r[9] == "true" for r in rows[1:])
    assert lines[-1].startswith("within_bound=16/16")
    assert run(*args)[1] == out


def test_batch_parallel_matches_serial():
    args = ["batch", "--game", "ham", "--n-range", "40:44:2", "--a-list", "2", "--breakers", "ham_delayer", "--seed", "1"]
    code1, serial = run(*args)
    code2, parallel = run(*args, "--jobs", "2")
    assert code1 == code2 == 0 and serial == parallel
    moves = [int(r[7]) for r in csv.reader(serial.strip().splitlines()[1:-1])]
    assert moves == [21, 22, 23]


def test_batch_empty_range_exit_2():
    assert run("batch", "--game", "pm", "--n-range", "60:40:2")[0] == 2
    assert run("batch", "--game", "pm", "--n-range", "abc")[0] == 2


def test_solve_prints_value():
    code, out = run("solve", "--board", "kn", "--n", "4", "--game", "pm", "--a", "1", "--b", "1")
    assert code == 0 and out.strip() == "BreakerWin"
    code, out = run("solve", "--n", "5", "--game", "pm", "--a", "1", "--first", "maker", "--hint")
    assert code == 0 and out.splitlines()[0] == "Exact 2"
    assert out.splitlines()[1].startswith("best move: ")


def test_solve_limit_exit_2():
    assert run("solve", "--n", "8", "--game", "ham", "--a", "2")[0] == 2


def test_play_session_reprompts_and_writes_transcript(tmp_path):
    path = tmp_path / "play.json"
    edges = [f"{u}-{v}" for u, v in itertools.combinations(range(8), 2)]
    script = "\n".join(["bogus", "0-1", "0-1", *edges]) + "\n"
    code, out = run("play", "--game", "pm", "--n", "8", "--a", "2", "--out", str(path), stdin=io.StringIO(script))
    assert code == 0
    assert "not available" in out
    assert "cannot read an edge" in out
    data = json.loads(path.read_text())
    assert data["moves"][0]["edges"][0] == [0, 1]
    assert "winner=" in out


def test_play_quit_exits_3():
    code, out = run("play", "--game", "pm", "--n", "8", "--a", "2", stdin=io.StringIO("quit\n"))
    assert code == 3


def test_replay_and_tamper(tmp_path):
    path = tmp_path / "t.json"
    run("simulate", "--game", "pm", "--n", "40", "--a", "2", "--seed", "2", "--out", str(path))
    code, out = run("replay", str(path))
    assert code == 0 and "replay=ok" in out
    data = json.loads(path.read_text())
    data["moves"][2]["edges"][0] = data["moves"][0]["edges"][0]
    path.write_text(json.dumps(data))
    assert run("replay", str(path))[0] == 4
    path.write_text("garbage")
    assert run("replay", str(path))[0] == 4
    assert run("replay", str(tmp_path / "missing.json"))[0] == 2


def test_helpers():
    assert parse_edge("3-1") == (1, 3)
    assert parse_edge(" 2,5 ") == (2, 5)
    with pytest.raises(ValueError):
        parse_edge("7")
    assert parse_range("1:5:2") == [1, 3, 5]
    assert parse_range("4:6") == [4, 5, 6]
