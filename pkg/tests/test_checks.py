from __future__ import annotations

from dtcalc.checks import CheckResult, additivity, open_restriction, run_instance
from dtcalc.instances import load


def test_result_lines():
    assert CheckResult("q1", "sum_rule", "quiver", True).line() == "PASS q1[quiver] sum_rule"
    assert CheckResult("q1", "associativity", "", False, "x").line() == "FAIL q1 associativity  (x)"


def test_every_check_passes_on_each_instance():
    for name in ("q1", "q2", "bgm", "a1gm", "a2gm_pm1", "p1gm"):
        failed = [r.line() for r in run_instance(load(name)) if not r.passed]
        assert failed == []


def test_open_parts_and_strata_are_consistent_on_quivers():
    for name in ("q1", "q2"):
        inst = load(name)
        for mu in inst.measures.values():
            assert open_restriction(inst.model, mu) == (True, "")
            assert additivity(inst.model, mu) == (True, "")


def test_table_models_skip_torus_only_checks():
    results = {r.check: r for r in run_instance(load("p1gm"))}
    assert "associativity" not in results
    assert results["mobius"].passed
