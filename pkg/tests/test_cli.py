import csv
import json

import pytest

from contestaudit.centipede import make_centipede
from contestaudit.cli import EXIT_BUDGET, EXIT_COUNTEREXAMPLES, EXIT_INPUT, EXIT_OK, EXIT_USAGE, main
from contestaudit.serialize import serialize, strategy_doc

from conftest import all_continue, all_stop


def run(argv):
    try:
        return main(argv)
    except SystemExit as exc:
        return exc.code


@pytest.fixture
def game4(tmp_path):
    path = tmp_path / "c4.json"
    assert run(["centipede", "--m", "4", "--out", str(path)]) == EXIT_OK
    return path


def write_strategy(path, strategy):
    path.write_text(json.dumps(strategy_doc(strategy)))
    return str(path)


def test_centipede_writes_document(tmp_path, capsys):
    out = tmp_path / "c10.json"
    assert run(["centipede", "--m", "10", "--out", str(out), "--csv", str(tmp_path / "c.csv")]) == EXIT_OK
    assert out.read_text() == serialize(make_centipede(10))
    rows = list(csv.reader((tmp_path / "c.csv").open()))
    assert rows[0] == ["terminal", "u1", "u2"] and rows[1] == ["t1", "2", "1"]
    assert len(rows) == 12
    assert capsys.readouterr().out == ""


def test_centipede_to_stdout(capsys):
    assert run(["centipede", "--m", "2"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["root"] == "d1"


def test_centipede_odd_m_is_usage_error():
    assert run(["centipede", "--m", "3"]) == EXIT_USAGE


def test_solve_spne(game4, tmp_path, capsys):
    out = tmp_path / "spne.json"
    assert run(["solve", "spne", "--game", str(game4), "--out", str(out)]) == EXIT_OK
    text = capsys.readouterr().out
    assert "payoff: (2, 1) unique: true" in text
    assert "seat 1: d1=S d3=S" in text
    assert json.loads(out.read_text())["type"] == "solve_result"


def test_solve_br(game4, tmp_path, capsys):
    opp = write_strategy(tmp_path / "o.json", all_continue(make_centipede(4), 2))
    assert run(["solve", "br", "--game", str(game4), "--player", "1", "--opponent", opp]) == EXIT_OK
    text = capsys.readouterr().out
    assert "d1=C d3=C" in text and "value: 6" in text


def test_check_commands(game4, tmp_path, capsys):
    tree = make_centipede(4)
    s1 = write_strategy(tmp_path / "s1.json", all_stop(tree, 1))
    s2 = write_strategy(tmp_path / "s2.json", all_stop(tree, 2))
    c2 = write_strategy(tmp_path / "c2.json", all_continue(tree, 2))
    assert run(["check", "nash", "--game", str(game4), "--s1", s1, "--s2", s2]) == EXIT_OK
    assert "nash: true" in capsys.readouterr().out
    assert run(["check", "spne", "--game", str(game4), "--s1", s1, "--s2", c2]) == EXIT_OK
    assert "spne: false" in capsys.readouterr().out


def test_contest_command(game4, tmp_path, capsys):
    tree = make_centipede(4)
    a1 = write_strategy(tmp_path / "a1.json", all_continue(tree, 1))
    a2 = write_strategy(tmp_path / "a2.json", all_continue(tree, 2))
    out, table = tmp_path / "r.json", tmp_path / "r.csv"
    argv = ["contest", "--game", str(game4), "--ai-p1", a1, "--ai-p2", a2, "--out", str(out), "--csv", str(table)]
    assert run(argv) == EXIT_OK
    assert "verdict: h_outperforms" in capsys.readouterr().out
    doc = json.loads(out.read_text())
    assert doc["totals"] == {"h": "12", "ai": "8"}
    assert list(csv.reader(table.open()))[-1] == ["total", "12", "8"]
    assert run(argv + ["--k", "3"]) == EXIT_OK
    assert json.loads(out.read_text())["totals"] == {"h": "36", "ai": "24"}


def test_contest_needs_both_h_strategies(game4, tmp_path):
    tree = make_centipede(4)
    a1 = write_strategy(tmp_path / "a1.json", all_continue(tree, 1))
    a2 = write_strategy(tmp_path / "a2.json", all_continue(tree, 2))
    assert run(["contest", "--game", str(game4), "--ai-p1", a1, "--ai-p2", a2, "--h-p1", a1]) == EXIT_USAGE


def test_audit_m4_reports_counterexamples(tmp_path, capsys):
    out, table = tmp_path / "a.json", tmp_path / "a.csv"
    status = run(["audit", "--m", "4", "--out", str(out), "--csv", str(table), "--max-listed", "-1"])
    assert status == EXIT_COUNTEREXAMPLES
    doc = json.loads(out.read_text())
    assert doc["type"] == "audit_report"
    assert doc["sweep"]["record_count"] == 157
    assert len(list(csv.reader(table.open()))) == 158
    assert "counterexamples: 157" in capsys.readouterr().out


def test_audit_benchmark_filter_exit_tracks_records(tmp_path):
    out = tmp_path / "b.json"
    status = run(["audit", "--m", "4", "--filter", "root+benchmark", "--out", str(out)])
    count = json.loads(out.read_text())["sweep"]["record_count"]
    assert status == (EXIT_COUNTEREXAMPLES if count >= 1 else EXIT_OK)


def test_audit_without_records_exits_zero(tmp_path):
    # a floor of 1 forces the AI to always continue at the root, which never ties or beats H here
    out = tmp_path / "z.json"
    status = run(["audit", "--m", "4", "--c-min", "1", "--grid", "1/2", "--out", str(out)])
    count = json.loads(out.read_text())["sweep"]["record_count"]
    assert (status == EXIT_COUNTEREXAMPLES) == (count >= 1)
    assert status in (EXIT_OK, EXIT_COUNTEREXAMPLES)


def test_audit_budget_exit(tmp_path):
    assert run(["audit", "--m", "4", "--budget", "100", "--out", str(tmp_path / "x.json")]) == EXIT_BUDGET


def test_audit_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run(["audit", "--m", "4", "--out", str(a)])
    run(["audit", "--m", "4", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


@pytest.mark.parametrize("content", ["{", '{"root": "d1", "nodes": {}}', "[]"])
def test_bad_game_file(tmp_path, content):
    path = tmp_path / "bad.json"
    path.write_text(content)
    assert run(["solve", "spne", "--game", str(path)]) == EXIT_INPUT


def test_missing_game_file(tmp_path):
    assert run(["solve", "spne", "--game", str(tmp_path / "nope.json")]) == EXIT_INPUT


def test_bad_strategy_file(game4, tmp_path):
    bad = tmp_path / "s.json"
    bad.write_text(json.dumps({"seat": 1, "kind": "pure", "choices": {"d9": "S"}}))
    good = write_strategy(tmp_path / "g.json", all_stop(make_centipede(4), 2))
    assert run(["check", "nash", "--game", str(game4), "--s1", str(bad), "--s2", good]) == EXIT_INPUT


@pytest.mark.parametrize(
    "argv",
    [[], ["bogus"], ["audit", "--grid", "2/3"], ["audit", "--m", "7"], ["solve", "br", "--game", "x"],
     ["contest", "--game", "x", "--k", "0"]],
)
def test_usage_errors(argv):
    assert run(argv) == EXIT_USAGE
