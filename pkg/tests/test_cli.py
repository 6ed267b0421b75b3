import json

import pytest

from hetsnet.cli import main
from hetsnet.instance import counterexample_instance, load_instance, load_meta, save_instance


@pytest.fixture
def cx_file(tmp_path):
    path = tmp_path / "cx.json"
    assert main(["counterexample", "--out", str(path)]) == 0
    return path


def test_counterexample_report(cx_file, capsys):
    assert load_instance(cx_file) == counterexample_instance()
    capsys.readouterr()
    assert main(["pne", str(cx_file), "--game", "g"]) == 0
    out = capsys.readouterr().out
    assert "0 PNE found" in out and "n/a" in out


def test_solve(cx_file, capsys):
    assert main(["solve", str(cx_file)]) == 0
    assert "optimal = 1" in capsys.readouterr().out


def test_gen_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert main(["gen", "--n", "3", "--m", "4", "--seed", "7", "--out", str(p)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert load_meta(a)["seed"] == 7


def test_gen_records_generated_seed(tmp_path, capsys):
    path = tmp_path / "r.json"
    assert main(["gen", "--n", "2", "--m", "2", "--out", str(path)]) == 0
    seed = load_meta(path)["seed"]
    again = tmp_path / "r2.json"
    assert main(["gen", "--n", "2", "--m", "2", "--seed", str(seed), "--out", str(again)]) == 0
    assert load_instance(path) == load_instance(again)


def test_brd_and_mwsls_replay(tmp_path, capsys):
    path = tmp_path / "i.json"
    main(["gen", "--n", "4", "--m", "5", "--seed", "1", "--out", str(path)])
    capsys.readouterr()
    assert main(["brd", str(path), "--q", "3"]) == 0
    first = capsys.readouterr().out
    seed = first.splitlines()[0].split("=")[1].strip()
    main(["brd", str(path), "--q", "3", "--seed", seed])
    assert capsys.readouterr().out == first
    assert main(["mwsls", str(path), "--seed", "5", "--trace", "--iters", "12"]) == 0
    out = capsys.readouterr().out
    assert "seed = 5" in out and "converged" in out
    assert out.count("t=") == 12


@pytest.mark.parametrize("game", ["g1", "g2", "g"])
def test_pne_games(tmp_path, capsys, game):
    path = tmp_path / "i.json"
    main(["gen", "--n", "3", "--m", "3", "--seed", "2", "--out", str(path)])
    assert main(["pne", str(path), "--game", game]) == 0
    assert "PNE found" in capsys.readouterr().out


def test_experiment_csv(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["experiment", "poa_pos", "--n", "2,3", "--m", "4", "--realizations", "3", "--seed", "9"]
    assert main(args + ["--csv", str(a)]) == 0
    assert main(args + ["--csv", str(b), "--workers", "2"]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert a.read_text().startswith("experiment,N,M,")


def test_usage_errors(tmp_path, capsys):
    assert main(["bogus"]) == 1
    assert main(["gen", "--n", "2"]) == 1
    assert main(["solve", str(tmp_path / "missing.json")]) == 1
    bad = tmp_path / "bad.json"
    doc = counterexample_instance().to_dict()
    del doc["gain"]
    bad.write_text(json.dumps(doc))
    assert main(["solve", str(bad)]) == 1
    assert "gain" in capsys.readouterr().err


def test_cap_exit_code(tmp_path, capsys):
    path = tmp_path / "big.json"
    main(["gen", "--n", "5", "--m", "5", "--seed", "0", "--out", str(path)])
    assert main(["pne", str(path), "--cap", "100"]) == 2
    assert "too large" in capsys.readouterr().err


def test_equilibrium_below_optimum(tmp_path, capsys):
    path = tmp_path / "i.json"
    main(["gen", "--n", "3", "--m", "4", "--seed", "11", "--out", str(path)])
    capsys.readouterr()
    main(["solve", str(path)])
    opt = int(capsys.readouterr().out.splitlines()[0].split("=")[1])
    main(["pne", str(path)])
    lines = capsys.readouterr().out.splitlines()
    welfare = [int(l.split()[1].rstrip(":")) for l in lines if l.strip().startswith("welfare")]
    assert all(w <= opt for w in welfare)
