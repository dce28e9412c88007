import json

import pytest

from edgeregret.cli import main


@pytest.fixture
def ex1(data_dir):
    return str(data_dir / "example1.json")


@pytest.fixture
def ex2(data_dir):
    return str(data_dir / "example2.json")


def test_solve_summary(ex1, capsys, tmp_path):
    out = tmp_path / "sol.json"
    assert main(["solve", "--instance", ex1, "--output", str(out)]) == 0
    text = capsys.readouterr().out
    assert "edge [1,2], t = 0.666667" in text
    assert "regret: 1.444444" in text
    sol = json.loads(out.read_text())
    assert sol["regret"] == pytest.approx(13 / 9)


def test_eval(ex1, ex2, capsys):
    assert main(["eval", "--instance", ex1, "--edge", "2,3", "--t", "0"]) == 0
    assert "regret: 2.166667" in capsys.readouterr().out
    assert main(["eval", "--instance", ex2, "--edge", "1", "--t", "1"]) == 0
    assert "regret: 7.902778" in capsys.readouterr().out


def test_demand_override(ex1, capsys):
    assert main(["solve", "--instance", ex1, "--demand", "linear"]) == 0
    assert "regret: 1.444444" in capsys.readouterr().out


def test_baselines(ex1, capsys):
    assert main(["baseline", "--instance", ex1]) == 0
    assert "regret: 2.166667" in capsys.readouterr().out
    assert main(["baseline", "--instance", ex1, "--mode", "deterministic"]) == 0
    text = capsys.readouterr().out
    assert "covered demand: 11.000000" in text and "regret: 2.166667" in text


def test_input_errors_exit_2(tmp_path, ex1, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"nodes": 3,')
    assert main(["solve", "--instance", str(bad)]) == 2
    assert "malformed JSON" in capsys.readouterr().err
    assert main(["solve"]) == 2
    assert main(["eval", "--instance", ex1, "--edge", "9", "--t", "0"]) == 2
    assert main(["eval", "--instance", ex1, "--edge", "a,b", "--t", "0"]) == 2


def test_dump_pp(ex1, capsys):
    assert main(["dump", "pp", "--instance", ex1]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0].split("\t") == ["edge", "label", "t", "node", "tags"]
    assert len(lines) == 7
    assert "BP+NIP" in lines[-1]


def test_dump_counts(ex1, ex2, capsys):
    assert main(["dump", "counts", "--instance", ex1, "--format", "csv"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines == [
        "edge,label,n_bp,n_nip,n_ep,n_ic",
        "1,\"[1,2]\",0,2,0,0",
        "2,\"[2,3]\",0,2,0,0",
        "3,\"[1,3]\",1,3,0,0",
    ]
    assert main(["dump", "counts", "--instance", ex2]) == 0


def test_dump_envelope_and_cells(ex1, ex2, capsys):
    assert main(["dump", "envelope", "--instance", ex1, "--edge", "1,2", "--format", "json"]) == 0
    pieces = json.loads(capsys.readouterr().out)
    assert pieces[0]["t_lo"] == 0.0 and pieces[-1]["t_hi"] == 1.0
    assert main(["dump", "cells", "--instance", ex2, "--edge", "1", "--edge-y", "2"]) == 0
    assert capsys.readouterr().out.count("\n") >= 4


def test_oracle(ex1, capsys, tmp_path):
    out = tmp_path / "o.json"
    assert main(["oracle", "--instance", ex1, "--grid", "600", "--output", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["within_gap"] and rep["difference"] <= rep["certified_gap"]


def test_gen_is_reproducible_and_solvable(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    args = ["gen", "--nodes", "7", "--density", "0.4", "--seed", "42"]
    assert main(args + ["--output", str(a)]) == 0
    assert main(args + ["--output", str(b)]) == 0
    assert a.read_text() == b.read_text()
    assert main(["solve", "--instance", str(a)]) == 0
    assert "regret:" in capsys.readouterr().out


def test_gen_from_street_graph(data_dir, capsys):
    assert main(["gen", "--street", str(data_dir / "triangle.edges"), "--demand", "linear", "--seed", "1"]) == 0
    d = json.loads(capsys.readouterr().out)
    assert d["nodes"] == 3 and d["demand_model"] == "linear"


def test_bench_small(tmp_path, capsys):
    rows, agg = tmp_path / "rows.csv", tmp_path / "agg.csv"
    argv = ["bench", "--nodes", "6", "--densities", "0.4", "--ubs", "10", "--radius-fracs", "0.2",
            "--replications", "2", "--rows", str(rows), "--output", str(agg)]  # fmt: skip
    assert main(argv) == 0
    assert "2 rows, 0 failed" in capsys.readouterr().err
    assert agg.read_text().startswith("nodes,density_or_edges,ub")
    assert len(rows.read_text().strip().splitlines()) == 3
