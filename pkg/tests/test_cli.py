import json

import pytest

from msvote.cli import main
from msvote.core import parse_election

STV_FILE = {"candidates": ["a", "b", "c"], "ballots": [
    {"ranking": ["a", "b", "c"], "weight": 3},
    {"ranking": ["b", "c", "a"], "weight": 2},
    {"ranking": ["c", "b", "a"], "weight": 2},
]}


@pytest.fixture
def election_file(tmp_path):
    path = tmp_path / "e.json"
    path.write_text(json.dumps(STV_FILE))
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_theorem_verify_t3(capsys):
    code, out, err = run(capsys, "theorem", "verify", "--id", "T3", "--rule", "l1:borda")
    assert code == 0 and json.loads(out)["pass"] is True and "pass" in err


def test_theorem_verify_with_params(capsys):
    code, out, _ = run(capsys, "theorem", "verify", "--id", "A_PE", "--rule", "thiele:pav",
                       "--param", "loose_constraints=true")
    assert code == 1 and json.loads(out)["pass"] is False


def test_theorem_branch_mismatch_is_usage_error(capsys):
    code, _, err = run(capsys, "theorem", "verify", "--id", "A_CM_2", "--rule", "thiele:pav")
    assert code == 2 and "p_2 > p_1" in err


def test_theorem_list(capsys):
    code, out, _ = run(capsys, "theorem", "list")
    ids = [x["id"] for x in json.loads(out)]
    assert code == 0 and "T3" in ids and "A_PE" in ids


def test_run_prints_finals(capsys, election_file):
    code, out, _ = run(capsys, "run", "--rule", "l1:plu", "--election", election_file, "--vector", "2,1")
    assert code == 0 and json.loads(out) == [["b"], ["c"]]


def test_run_deterministic(capsys, election_file):
    code, out, _ = run(capsys, "run", "--rule", "l1:plu", "--election", election_file, "--vector", "2,1",
                       "--deterministic")
    assert code == 0 and json.loads(out) == [["b"]]


def test_axiom_check_holds(capsys, election_file):
    code, out, _ = run(capsys, "axiom", "check", "--axiom", "solid-coalition", "--rule", "l1:plu",
                       "--election", election_file, "--vector", "2,1")
    assert code == 0 and json.loads(out)["holds"] is True


def test_axiom_check_violated(capsys, tmp_path):
    path = tmp_path / "bloc.json"
    path.write_text(json.dumps({"candidates": ["a", "b", "c"], "ballots": [
        {"ranking": ["c", "a", "b"], "weight": 2}, {"ranking": ["a", "b", "c"], "weight": 1},
        {"ranking": ["b", "a", "c"], "weight": 1}]}))
    code, out, _ = run(capsys, "axiom", "check", "--axiom", "solid-coalition", "--rule", "l1:app",
                       "--election", str(path), "--vector", "2")
    doc = json.loads(out)
    assert code == 1 and doc["witness"]["candidate"] == "c" and doc["witness"]["committee"] == ["a", "b"]


def test_axiom_check_needs_second_input(capsys, election_file):
    code, _, err = run(capsys, "axiom", "check", "--axiom", "consistency", "--rule", "l1:plu",
                       "--election", election_file, "--vector", "1")
    assert code == 2 and "--election2" in err


def test_axiom_search(capsys):
    code, out, _ = run(capsys, "axiom", "search", "--axiom", "candidate-monotonicity", "--rule",
                       "l1:plu;l1:plu", "--seed", "0", "--budget", "500", "--max-n", "10")
    doc = json.loads(out)
    assert code == 1 and doc["found"] and doc["verdict"]["holds"] is False
    code, out, _ = run(capsys, "axiom", "search", "--axiom", "candidate-monotonicity", "--rule", "l1:plu",
                       "--budget", "0")
    assert code == 0 and json.loads(out)["found"] is False


def test_usage_errors(capsys, election_file):
    assert run(capsys, "bogus")[0] == 2
    assert run(capsys, "run", "--rule", "l1:plu")[0] == 2
    assert run(capsys, "run", "--rule", "xx:plu", "--election", election_file, "--vector", "1")[0] == 2
    assert run(capsys, "run", "--rule", "l1:plu", "--election", "/nonexistent.json", "--vector", "1")[0] == 2
    assert run(capsys, "run", "--rule", "l1:plu", "--election", election_file, "--vector", "3")[0] == 2
    assert run(capsys, "--help")[0] == 0


def test_cap_overflow_exit_code(capsys, election_file, monkeypatch):
    monkeypatch.setenv("MSVOTE_ENUM_CAP", "1")
    code, _, err = run(capsys, "run", "--rule", "lmax:borda", "--election", election_file, "--vector", "2")
    assert code == 3 and "(m=3, k=2)" in err


@pytest.mark.parametrize("kind", ["ranked-uniform", "approval-uniform", "euclidean"])
def test_gen_is_deterministic(capsys, kind):
    args = ("gen", "--kind", kind, "--m", "3", "--n", "6", "--seed", "5")
    _, first, _ = run(capsys, *args)
    _, second, _ = run(capsys, *args)
    assert first == second
    e = parse_election(first)
    assert e.m == 3 and e.n == 6


def test_gen_edge_cases(capsys):
    _, out, _ = run(capsys, "gen", "--kind", "approval-uniform", "--m", "4", "--n", "5", "--p", "1")
    assert all(b.approved == frozenset(range(4)) for b in parse_election(out).ballots)
    _, out, _ = run(capsys, "gen", "--kind", "ranked-uniform", "--m", "3", "--n", "6")
    assert all(b.weight == 1 for b in parse_election(out).ballots)
    assert run(capsys, "gen", "--kind", "approval-uniform", "--m", "4", "--n", "5", "--p", "0")[0] == 2


def test_simulate_writes_outputs(capsys, tmp_path):
    out_csv, out_svg = tmp_path / "r.csv", tmp_path / "g.svg"
    code, out, _ = run(capsys, "simulate", "--rule", "l1:plu", "--seed", "42", "--k2", "4", "--k1", "4,10,30",
                       "--trials", "2", "--out", str(out_csv), "--svg", str(out_svg))
    assert code == 0
    assert len(out_csv.read_text().splitlines()) == 7
    assert out_svg.read_text().count("<path") == 1
    assert set(json.loads(out)) == {"score", "gini"}
