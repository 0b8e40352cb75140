import json
import subprocess
import sys

import pytest

from ccflip.cli import main
from ccflip.graph import read_clustering, write_graph
from ccflip.generators import gen_cliques


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_solve_fixed_x_slices(capsys):
    code, out, _ = run(capsys, "solve", "--gen", "hamming:3,5,5:2", "--alg", "fixed:x-slices")
    rep = json.loads(out)
    assert code == 0 and rep["cost"] == "675" and rep["cost_doubled"] == 1350


def test_solve_writes_outputs(capsys, tmp_path):
    out_json = tmp_path / "r.json"
    out_cl = tmp_path / "c.txt"
    code, _, _ = run(capsys, "solve", "--gen", "cliques:3,4", "--alg", "local_search", "--out", str(out_json),
                     "--clustering-out", str(out_cl))
    assert code == 0
    assert json.loads(out_json.read_text())["cost"] == "0"
    assert sorted(read_clustering(out_cl).clusters) == [(0, 1, 2), (3, 4, 5, 6)]


@pytest.mark.parametrize("alg", ["acn", "brute_force", "two_round", "iterated_flipping", "faster_local_search"])
def test_solve_each_algorithm_on_file(capsys, tmp_path, alg):
    p = tmp_path / "g.txt"
    write_graph(gen_cliques([3, 3, 2]), p)
    code, out, _ = run(capsys, "solve", "--input", str(p), "--alg", alg, "--k", "2")
    rep = json.loads(out)
    assert code == 0 and rep["cost"] == "0" and rep["instance"].startswith("file:sha256:")


def test_compare_cliques(capsys):
    code, out, _ = run(capsys, "compare", "--gen", "cliques:3,4,5", "--k", "2")
    assert code == 0
    rows = [line.split() for line in out.strip().splitlines()[1:]]
    assert {r[0] for r in rows} == {"acn", "two_round", "iterated_flipping", "faster_local_search"}
    assert all(r[1] == "0" for r in rows)


def test_compare_json(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("CC_THREADS", "2")
    p = tmp_path / "cmp.json"
    code, _, _ = run(capsys, "compare", "--gen", "gnp:8,0.5:1", "--k", "1", "--trials", "2", "--out", str(p))
    reps = json.loads(p.read_text())
    assert code == 0 and len(reps) == 8
    assert all(r["schema_version"] == 1 for r in reps)


def test_verify_pivot(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "pivot", "--trials", "500", "--seed", "7")
    assert code == 0 and out.startswith("PASS pivot: 500/500")


@pytest.mark.parametrize("argv", [
    ["solve", "--gen", "cliques:3", "--alg", "simulated_annealing"],
    ["solve", "--alg", "acn"],
    ["solve", "--gen", "torus:4", "--alg", "acn"],
    ["solve", "--input", "/nonexistent/graph.txt", "--alg", "acn"],
    ["solve", "--gen", "cliques:3", "--alg", "fixed:x-slices"],
    ["verify", "--suite", "nope"],
])
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and "error" in err


def test_console_entry_point():
    out = subprocess.run([sys.executable, "-m", "ccflip.cli", "solve", "--gen", "cliques:2,2", "--alg", "acn"],
                         capture_output=True, text=True, check=True)
    assert json.loads(out.stdout)["cost"] == "0"
