from __future__ import annotations

import json

import pytest

from dtcalc.errors import ParseError, SchemaError
from dtcalc.instances import corpus_dir, corpus_files, load, load_corpus, loads, parse_instance, quiver_weights

NAMES = ["a1gm", "a2gm_pm1", "bgm", "p1gm", "q1", "q2"]


def payload(name):
    return json.loads((corpus_dir() / f"{name}.json").read_text())


def test_corpus_ships_the_six_instances():
    assert [p.stem for p in corpus_files()] == NAMES
    assert [i.name for i in load_corpus()] == NAMES


def test_quiver_weights_are_target_minus_source():
    assert quiver_weights(3, [[0, 1], [1, 2]]) == [[-1, 1, 0], [0, -1, 1]]
    assert quiver_weights(3, [[0, 1], [0, 2]]) == [[-1, 1, 0], [-1, 0, 1]]


@pytest.mark.parametrize("name", NAMES)
def test_echoed_instance_reparses_to_the_same_model(name):
    inst = load(name)
    again = parse_instance(inst.to_json())
    assert again.model == inst.model
    assert sorted(again.measures) == sorted(inst.measures)
    for k, mu in inst.measures.items():
        assert again.measures[k] == mu


def test_bad_json_reports_line_and_column():
    with pytest.raises(ParseError, match=r"x:2:11"):
        loads('{"kind":\n "quiver" "model": {}}', "x")


def test_schema_error_names_the_field():
    p = payload("a1gm")
    p["model"]["weights"] = [["one"]]
    with pytest.raises(SchemaError) as err:
        parse_instance(p)
    assert "model['weights'][0][0]" in str(err.value)


def test_rationals_must_be_strings():
    p = payload("a1gm")
    p["measures"]["half"]["values"][1]["value"] = 0.5
    with pytest.raises(SchemaError):
        parse_instance(p)


def test_unknown_kind_is_rejected():
    p = payload("a1gm")
    p["kind"] = "scheme"
    with pytest.raises(SchemaError):
        parse_instance(p)


def test_unknown_default_measure():
    p = payload("a1gm")
    p["default_measure"] = "nope"
    with pytest.raises(SchemaError, match="default_measure"):
        parse_instance(p)


def test_missing_measure_lookup():
    with pytest.raises(SchemaError, match="no measure named"):
        load("q1").measure("nope")


def test_theta_needs_a_torus_model():
    p = payload("p1gm")
    p["theta"] = {"linear_form": ["1"], "norm": [["1"]]}
    with pytest.raises(SchemaError):
        parse_instance(p)


def test_theta_shape_is_checked():
    p = payload("a2gm_pm1")
    p["theta"]["linear_form"] = ["1", "0"]
    with pytest.raises(SchemaError, match="linear_form"):
        parse_instance(p)


def test_corpus_location_can_be_overridden(tmp_path, monkeypatch):
    (tmp_path / "only.json").write_text((corpus_dir() / "bgm.json").read_text())
    monkeypatch.setenv("DTCALC_CORPUS", str(tmp_path))
    assert [p.name for p in corpus_files()] == ["only.json"]
    assert load("only").model.rank == 1


def test_missing_instance():
    with pytest.raises(FileNotFoundError):
        load("no_such_instance")
