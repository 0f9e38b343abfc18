import json

import pytest

from jetvar import operators, paperlab
from jetvar.paperlab import CATALOGUE, run_check, run_suite

FAST = [cid for cid in CATALOGUE if cid != "order6-nonexistence"]


def negated_adjoint(original):
    def adjoint(a):
        return -original(a)
    return adjoint


@pytest.mark.parametrize("check_id", FAST)
def test_fast_checks_pass(check_id):
    r = run_check(check_id)
    assert r.passed, (r.details, r.counterexample)
    assert r.counterexample is None


def test_catalogue_contains_required_checks():
    required = {
        "euler-lagrangian-2var", "euler-lagrangian-3var", "prop1", "prop2", "commutator-dt",
        "eq-firstterm", "lemma2-relation", "lemma3-cancellation", "lemma4-exactness",
        "scaling-cosym", "order6-nonexistence", "example-decomposition",
        "trivial-characteristic", "remark-density", "nontrivial-cl-bounded",
        "xi-onshell-closed",
    }
    assert required <= set(CATALOGUE)


def test_unknown_check():
    with pytest.raises(KeyError):
        run_check("no-such-check")
    with pytest.raises(KeyError):
        run_suite(["prop1", "no-such-check"])


def test_empty_filter_gives_empty_report():
    report = run_suite([])
    assert report.ok
    assert report.as_dict() == {"suite": "paper", "results": [], "summary": {"pass": 0, "fail": 0}}


def test_report_schema():
    report = run_suite(["trivial-characteristic", "remark-density"])
    d = json.loads(json.dumps(report.as_dict()))
    assert d["summary"] == {"pass": 2, "fail": 0}
    for r in d["results"]:
        assert set(r) == {"check_id", "status", "elapsed_ms", "details"}


def test_checks_are_order_independent():
    ids = ["prop2", "eq-firstterm", "remark-density"]
    a = {r.check_id: (r.status, r.details) for r in run_suite(ids).results}
    b = {r.check_id: (r.status, r.details) for r in run_suite(ids[::-1]).results}
    assert a == b


def test_mutated_adjoint_is_caught(monkeypatch):
    monkeypatch.setattr(operators, "op_adjoint", negated_adjoint(operators.op_adjoint))
    for cid in ("prop2", "scaling-cosym"):
        r = run_check(cid)
        assert r.status == "fail"
        assert r.counterexample
        assert "counterexample" in r.as_dict()


def test_crashing_check_reports_failure(monkeypatch):
    def boom():
        raise RuntimeError("broken")
    monkeypatch.setitem(CATALOGUE, "trivial-characteristic", boom)
    r = run_check("trivial-characteristic")
    assert r.status == "fail" and "broken" in r.counterexample


def test_bounded_scope_is_reported():
    r = run_check("nontrivial-cl-bounded")
    assert "bounded scope" in r.details
    g1, g2 = paperlab.nontrivial_cl_specs()
    assert (g1.weight, g2.weight) == (3, 1)
