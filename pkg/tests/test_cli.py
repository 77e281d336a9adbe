import csv
import io
import json
import math

import pytest

from builders import make_scene, ped
from crfintent.cli import cli_main
from crfintent.scene import save_scene


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli_main([str(a) for a in argv], out=out, err=err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def two_peds(tmp_path):
    scene = make_scene(
        [ped("a", (0, 0), 0.8, "left"), ped("b", (30, 0), 0.3, "left")],
        pp={("a", "b"): (0.6, 0.2, 0.2)},
        pe={"a": 0.7, "b": 0.4},
    )
    path = tmp_path / "two.json"
    save_scene(scene, path)
    return path


@pytest.fixture
def generated(tmp_path):
    path = tmp_path / "gen.json"
    assert run("generate", "--n", 5, "--seed", 2, "-o", path)[0] == 0
    return path


def test_infer(two_peds):
    code, out, _ = run("infer", two_peds)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "a → C"
    assert lines[1] == "b → NC"
    assert "method: exhaustive" in out
    assert lines[-1].startswith("total energy: ")


def test_infer_ussa_with_flags(generated):
    code, out, err = run("infer", generated, "--preset", "pie-infer", "--beta", "2.0", "--seed", 4,
                         "--exhaustive-threshold", 3, "--tau0", 2, "--cooling", 0.9, "--max-iters", 50)
    assert code == 0
    assert "method: ussa" in out
    assert sum("→" in line for line in out.splitlines()) == 5


def test_exact_distribution(two_peds):
    code, out, _ = run("exact", two_peds, "--distribution")
    assert code == 0
    table = out.split("configuration\tprobability\n")[1].splitlines()
    assert [row.split("\t")[0] for row in table] == ["00", "01", "10", "11"]
    assert math.fsum(float(row.split("\t")[1]) for row in table) == pytest.approx(1.0, abs=1e-9)


def test_exact_distribution_cap(tmp_path):
    path = tmp_path / "big.json"
    run("generate", "--n", 13, "-o", path)
    code, _, err = run("exact", path, "--distribution")
    assert code == 2 and "12" in err


def test_malformed_file(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{", encoding="utf-8")
    code, out, err = run("infer", path)
    assert code == 2
    assert out == ""
    assert len(err.strip().splitlines()) == 1


def test_invalid_scene(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"pedestrians": [{"id": "a", "boxes": [[0, 0, 1, 1]], "unary_prob": 2}]}))
    assert run("infer", path)[0] == 2


def test_missing_file(tmp_path):
    assert run("infer", tmp_path / "nope.json")[0] == 2


@pytest.mark.parametrize("argv", [(), ("frobnicate",), ("infer",), ("bench", "--trials", "x"),
                                  ("infer", "s.json", "--cooling", "1.5"), ("bench", "--trials", "-1")])
def test_usage_errors(argv):
    assert run(*argv)[0] == 1


def test_generate_stdout_round_trip():
    code, out, _ = run("generate", "--n", 3, "--seed", 9, "--orientation", "unknown")
    assert code == 0
    doc = json.loads(out)
    assert len(doc["pedestrians"]) == 3
    assert all(p["orientation"] is None for p in doc["pedestrians"])


def test_bench_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert run("bench", "--n", 5, "--trials", 10, "--scene-seed", 3, "--seed", 1, "-o", path)[0] == 0
    assert a.read_bytes() == b.read_bytes()
    assert json.loads(a.read_text())["scenes"] == 10


def test_trace(generated, tmp_path):
    path = tmp_path / "t.csv"
    code, out, _ = run("trace", generated, "-o", path, "--max-iters", 40)
    assert code == 0
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["evaluation", "candidate_energy", "best_energy", "temperature"]
    assert len(rows) == 42


def test_unused_pairs_reported_once(generated):
    code, _, err = run("infer", generated)
    assert code == 0
    assert err.count("warning") <= 1
