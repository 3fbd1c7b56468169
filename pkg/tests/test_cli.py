from __future__ import annotations

import json

import pytest

from dtcalc.cli import main
from dtcalc.instances import corpus_dir


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_inspect_quiver(capsys):
    code, out, _ = run(capsys, "inspect", "q1", "--json")
    rep = json.loads(out)
    assert code == 0
    assert len(rep["faces"]) == 4
    assert rep["crk"] == 1
    top = rep["faces"][-1]
    assert sorted(c["values"]["quiver"] for c in top["cones"]) == ["1/3", "1/3", "1/6", "1/6"]
    assert all(f["mass"]["quiver"] == "1" for f in rep["faces"])


def test_inspect_classifying_stack(capsys):
    code, out, _ = run(capsys, "inspect", "bgm", "--json")
    rep = json.loads(out)
    assert [f["face"] for f in rep["faces"]] == ["Q^1"]
    assert len(rep["faces"][0]["cones"]) == 1


def test_inspect_text(capsys):
    code, out, _ = run(capsys, "inspect", "q1")
    assert code == 0
    assert "central face span{(1,1,1)}, crk 1" in out
    assert "[3:1] {-x1+x2>=0}" in out


def test_malformed_file(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"kind": "quiver", "model": {"vertices": 3, "edges": [[0, 1]]}, "measures": {"m": {"type": "nope"}}}')
    code, _, err = run(capsys, "inspect", str(bad))
    assert code == 2
    assert "SchemaError" in err and "measures" in err


def test_epsilon_projective_line(capsys):
    code, out, _ = run(capsys, "epsilon", "p1gm", "--k", "0", "--measure", "ab(1,0)", "--json")
    rep = json.loads(out)
    assert rep["epsilon"]["text"] == "-[1]"
    assert rep["no_pole"] is True


def test_epsilon_affine_line(capsys):
    code, out, _ = run(capsys, "epsilon", "a1gm", "--k", "1")
    assert "strata:    1/2*[0] + 1/2*[a]" in out


def test_epsilon_above_the_rank_is_zero(capsys):
    code, out, _ = run(capsys, "epsilon", "q1", "--k", "5", "--json")
    rep = json.loads(out)
    assert rep["epsilon"]["terms"] == [] and rep["epsilon"]["realized"] == {"num": ["0"], "den": ["1"]}


def test_epsilon_by_cone(capsys):
    code, out, _ = run(capsys, "epsilon", "q1", "--cone", "0:0", "--json")
    rep = json.loads(out)
    assert rep["epsilon"]["realized_text"] == "1/3/(L - 1)"
    code, _, err = run(capsys, "epsilon", "q1", "--cone", "9:9")
    assert code == 2 and "no cone" in err


@pytest.mark.parametrize("name, value", [("q1", "1/3"), ("q2", "1/6"), ("bgm", "1")])
def test_dt_values(capsys, name, value):
    code, out, _ = run(capsys, "dt", name, "--k", "1", "--motivic", "--json")
    rep = json.loads(out)
    assert code == 0
    assert rep["dt"] == value
    assert rep["dt_motivic"]["num"] == [value] and rep["dt_motivic"]["den"] == ["1"]


def test_check_all_passes(capsys):
    code, out, _ = run(capsys, "check", "--all")
    assert code == 0
    assert out.strip().endswith("0 failed")
    assert "FAIL" not in out


def test_check_one_file(capsys):
    code, out, _ = run(capsys, "check", str(corpus_dir() / "a1gm.json"), "--json")
    rep = json.loads(out)
    assert code == 0 and rep["instances"] == ["a1gm"] and rep["ok"]


def test_bad_measure_fails_the_check(capsys, tmp_path, monkeypatch):
    p = json.loads((corpus_dir() / "a1gm.json").read_text())
    p["measures"]["half"]["values"][1]["value"] = "1/3"
    (tmp_path / "a1gm.json").write_text(json.dumps(p))
    monkeypatch.setenv("DTCALC_CORPUS", str(tmp_path))
    code, out, _ = run(capsys, "check", "--all")
    assert code == 1
    assert "FAIL a1gm[half] partition" in out


def test_empty_corpus_warns(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("DTCALC_CORPUS", str(tmp_path))
    code, out, err = run(capsys, "check", "--all")
    assert code == 0
    assert "warning" in err


def test_invalid_measure_is_an_input_error(capsys, tmp_path):
    p = json.loads((corpus_dir() / "a1gm.json").read_text())
    p["measures"]["half"]["values"][1]["value"] = "1/3"
    f = tmp_path / "bad.json"
    f.write_text(json.dumps(p))
    code, _, err = run(capsys, "epsilon", str(f), "--k", "0", "--measure", "half")
    assert code == 2 and "MeasureInvalid" in err


@pytest.mark.parametrize("argv", [["inspect", "q1", "--json"], ["dt", "p1gm", "--k", "1", "--json"],
                                  ["check", "--all", "--json"]])
def test_reports_are_deterministic(capsys, argv):
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second


def test_report_echo_round_trips(capsys):
    from dtcalc.instances import load, parse_instance

    _, out, _ = run(capsys, "inspect", "a2gm_pm1", "--json")
    echoed = parse_instance(json.loads(out)["echo"])
    assert echoed.model == load("a2gm_pm1").model
