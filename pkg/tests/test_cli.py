import json

import pytest

from postqaoa.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


@pytest.fixture
def graph_file(tmp_path, capsys):
    code, out = run(capsys, "gen", "--n", "12", "--seed", "1")
    assert code == 0
    path = tmp_path / "g.txt"
    path.write_text(out)
    return path


def test_gen_is_deterministic(capsys):
    assert run(capsys, "gen", "--n", "20", "--seed", "4") == run(capsys, "gen", "--n", "20", "--seed", "4")


def test_expect_and_couplings(capsys, graph_file, tmp_path):
    code, out = run(capsys, "expect", str(graph_file))
    assert code == 0 and 0 < json.loads(out)["fraction"] < 1
    code, out = run(capsys, "couplings", str(graph_file), "--seed", "0")
    assert code == 0
    inst = tmp_path / "inst.json"
    inst.write_text(out)
    code, out = run(capsys, "optimize", str(inst))
    assert code == 0 and "value" in json.loads(out)


def test_improve(capsys, graph_file):
    code, out = run(capsys, "improve", str(graph_file), "--seed", "0")
    assert code == 0
    assert json.loads(out)["gain_edges"] >= 0


def test_ring(capsys):
    code, out = run(capsys, "ring", "--n", "12")
    data = json.loads(out)
    assert code == 0 and data["pair_coefficient"] == pytest.approx(9 / 32)


@pytest.mark.parametrize("argv,value", [
    (["--which", "ring", "--n", "12", "--R", "1"], 10.0),
    (["--which", "regular", "--n", "100", "--d", "3", "--R", "1", "--eps", "0.01"], 125.25),
    (["--which", "overlap", "--edges", "150", "--maxcut", "130", "--R", "1", "--eps", "0.01"], 117.625),
])
def test_bounds(capsys, argv, value):
    code, out = run(capsys, "bounds", *argv)
    assert code == 0 and json.loads(out)["value"] == pytest.approx(value)


def test_bounds_missing_argument(capsys):
    with pytest.raises(SystemExit):
        main(["bounds", "--which", "regular", "--n", "10"])


def test_experiment_csv(capsys):
    code, out = run(capsys, "experiment", "postselect", "--n", "30", "--count", "2", "--seed", "0")
    assert code == 0
    assert out.splitlines()[0] == "seed,n,alpha,gain_edges,gain_fraction,bound_fraction,solver,runtime_ms"
    assert len(out.splitlines()) == 3


def test_experiment_requires_seed(capsys):
    with pytest.raises(SystemExit):
        main(["experiment", "postselect", "--n", "30", "--count", "1"])


def test_verify_exit_codes(capsys):
    code, out = run(capsys, "verify", "table1")
    assert code == 0 and json.loads(out)["passed"]
    code, out = run(capsys, "verify", "ring")
    assert code == 1 and not json.loads(out)["passed"]


def test_bad_input_exit_code(capsys, tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("not a graph\n")
    assert main(["expect", str(bad)]) == 2
