import json

import pytest

from qsuper.cli import main


def run(capsys, *args):
    code = main(list(args))
    return code, capsys.readouterr().out


def run_json(capsys, *args):
    code, out = run(capsys, *args)
    return code, json.loads(out)


def test_cartan_check_preset(capsys):
    code, rep = run_json(capsys, "cartan", "check", "--preset", "B2odd")
    assert code == 0 and rep["ok"] and rep["finite_type"]


def test_cartan_check_parity_violation(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"rank": 2, "a": [[2, -1], [-1, 2]], "d": [1, 1], "parity": [1, 0]}))
    code, rep = run_json(capsys, "cartan", "check", "--datum", str(path))
    assert code == 1
    assert rep["violation"]["axiom"] == "superdatum parity"


def test_hw_dims_adjoint(capsys):
    code, rep = run_json(capsys, "hw", "dims", "--preset", "A2", "--lambda", "1,1", "--cutoff", "4")
    assert code == 0
    assert rep["dims"]["1,1"]["dim"] == 2 and rep["total"] == 8


def test_hw_dims_csv(capsys):
    code, out = run(capsys, "hw", "dims", "--preset", "A1odd", "--lambda", "2", "--format", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "beta,dim,weyl_kac"
    assert "2,1,1" in lines


@pytest.mark.parametrize("cmd", ["char", "verify", "casimir", "gauge"])
def test_hw_commands(capsys, cmd):
    code, rep = run_json(capsys, "hw", cmd, "--preset", "A1odd", "--lambda", "2", "--cutoff", "3")
    assert code == 0 and rep["ok"]


@pytest.mark.parametrize("cmd,extra", [("dim", ["--cutoff", "4"]), ("gram", ["--beta", "2,1"]), ("serre", [])])
def test_uminus_commands(capsys, cmd, extra):
    code, rep = run_json(capsys, "uminus", cmd, "--preset", "A2", *extra)
    assert code == 0 and rep["ok"]


def test_qhs_straighten(capsys):
    code, rep = run_json(capsys, "qhs", "straighten", "--preset", "A1odd", "--n", "2", "--expr", "t1*x2*e(1,1)")
    assert code == 0
    assert rep["terms"] == [{"nu": [1, 1], "a": [0, 0], "w": [], "coeff": "1"},
                            {"nu": [1, 1], "a": [1, 0], "w": [1], "coeff": "-1"}]


def test_qhs_verify_and_dim(capsys):
    code, rep = run_json(capsys, "qhs", "verify", "--preset", "A1odd", "--fuzz", "50", "--b-max", "3")
    assert code == 0 and rep["ok"]
    code, rep = run_json(capsys, "qhs", "dim", "--preset", "A2", "--beta", "1,1", "--lo", "-2", "--hi", "4")
    assert code == 0 and rep["ok"]


def test_perfect_check(capsys):
    code, rep = run_json(capsys, "perfect", "check", "--preset", "A1", "--lambda", "2")
    assert code == 0 and rep["ok"]


def test_verify_all_is_deterministic(capsys):
    args = ["verify", "all", "--preset", "A1odd", "--cutoff", "3", "--fuzz", "50"]
    code1, out1 = run(capsys, *args)
    code2, out2 = run(capsys, *args)
    assert code1 == code2 == 0
    assert out1 == out2


def test_verify_all_config_and_jobs(capsys, tmp_path, monkeypatch):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"preset": "A1", "cutoff": 3, "fuzz": 30, "weights": ["1", "2"]}))
    code, serial = run(capsys, "verify", "all", "--config", str(cfg))
    monkeypatch.setenv("QSUPER_JOBS", "2")
    code2, parallel = run(capsys, "verify", "all", "--config", str(cfg))
    assert code == code2 == 0
    assert serial == parallel
    assert sorted(json.loads(serial)["modules"]) == ["1", "2"]


@pytest.mark.parametrize("args", [
    ["hw", "dims", "--preset", "A2", "--lambda", "x"],
    ["hw", "dims", "--preset", "A2"],
    ["hw", "dims", "--preset", "Z9", "--lambda", "1"],
    ["verify", "all"],
    ["hw", "dims", "--preset", "A2", "--lambda", "1,1", "--cutoff", "0"],
    ["qhs", "straighten", "--preset", "A1", "--n", "2", "--expr", "y1"],
])
def test_config_errors(capsys, args):
    code, rep = run_json(capsys, *args)
    assert code == 2
    assert rep["ok"] is False and rep["error"]["kind"] in ("usage", "config", "datum")


def test_bad_config_file(capsys, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"preset": "A1", "colour": "red"}))
    code, rep = run_json(capsys, "verify", "all", "--config", str(cfg))
    assert code == 2 and "colour" in rep["error"]["message"]


def test_out_file(capsys, tmp_path):
    out = tmp_path / "r.json"
    code, _ = run(capsys, "hw", "char", "--preset", "A2", "--lambda", "1,0", "--out", str(out))
    assert code == 0
    assert json.loads(out.read_text())["ok"]


def test_perfect_check_input(capsys, tmp_path):
    from test_perfect import based_module_json, rank_one
    _, bm = rank_one("A1odd", 2)
    path = tmp_path / "bm.json"
    path.write_text(json.dumps(based_module_json(bm)))
    code, rep = run_json(capsys, "perfect", "check", "--preset", "A1odd", "--input", str(path))
    assert code == 0 and rep["perfect"] and rep["strong"]
    assert {row["i"] for row in rep["entries"]} == {1}
