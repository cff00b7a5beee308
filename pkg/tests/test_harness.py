import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fsa import harness, poly
from fsa import proptests as pt
from fsa.errors import InfeasibleSpec
from fsa.fileio import dump_report, make_report
from fsa.proptests import Path, Property
from fsa.ratlin import rank
from fsa.spectra import char_poly, eigenvalues, jordan_chains


def test_jordan_spec_normalises_and_sizes():
    spec = harness.JordanSpec(((2, [3]), ("1/2", (1, 1))), seed=3)
    assert spec.n == 5
    assert spec.char_poly() == poly.from_roots([2, 2, 2, "1/2", "1/2"])
    assert spec.to_json() == {"blocks": [["2", [3]], ["1/2", [1, 1]]], "seed": 3}


def test_jordan_spec_rejects_empty_chain():
    with pytest.raises(InfeasibleSpec):
        harness.JordanSpec(((1, (0,)),))


def test_more_functionals_than_states_is_infeasible():
    spec = harness.JordanSpec(((1, (2,)),))
    with pytest.raises(InfeasibleSpec):
        harness.generate_system(spec, 1, 1, 3)
    with pytest.raises(InfeasibleSpec):
        harness.generate_system(spec, 1, 1, 0)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_generated_systems_have_requested_structure(index):
    rng = random.Random(index)
    bounds = harness.SizeBounds(max_n=5)
    spec = harness.random_spec(rng, bounds)
    s = harness.generate_system(spec, 2, 1, 1)
    assert char_poly(s.A) == spec.char_poly()
    assert rank(s.F) == s.F.nrows == 1
    assert s.B.shape == (spec.n, 2) and s.C.shape == (1, spec.n)
    for ev in eigenvalues(s.A):
        want = sorted(L for e, Ls in spec.blocks if e == ev.value for L in Ls)
        assert sorted(c.length for c in jordan_chains(s.A, ev)) == want
        assert max(want) <= bounds.max_chain


def test_system_for_index_is_deterministic_and_prefix_stable():
    a = harness.system_for_index(9, 17)
    b = harness.system_for_index(9, 17)
    assert a == b
    assert harness.system_for_index(9, 18) != a
    short = harness.cross_validate(3, seed=9, deep=False)
    long = harness.cross_validate(5, seed=9, deep=False)
    assert [r.to_json() for r in short.records] == [r.to_json() for r in long.records[:3]]


def test_report_bytes_do_not_depend_on_worker_count():
    one = harness.cross_validate(6, seed=4, workers=1)
    two = harness.cross_validate(6, seed=4, workers=2)
    assert dump_report(make_report("fuzz", **one.to_json())) == dump_report(make_report("fuzz", **two.to_json()))


def test_zero_systems_is_an_empty_clean_run():
    rep = harness.cross_validate(0, seed=1)
    assert rep.ok and rep.records == []
    assert rep.tally() == {p.value: 0 for p in Property}


def test_clean_run_has_no_findings():
    rep = harness.cross_validate(25, seed=3)
    assert rep.ok
    data = json.loads(json.dumps(rep.to_json()))
    assert data["count"] == 25 and len(data["systems"]) == 25
    assert set(data["holds_tally"]) == {p.value for p in Property}


def test_injected_route_disagreement_is_caught(monkeypatch):
    real = pt.decide

    def broken(sys, prop, path=Path.ORACLE, tol=pt.DEFAULT_TOLERANCES, diagnostics=False):
        v = real(sys, prop, path, tol, diagnostics)
        if Property(prop) is Property.TOC and Path(path) is Path.PBH:
            v.holds = not v.holds
        return v

    monkeypatch.setattr(pt, "decide", broken)
    rep = harness.cross_validate(5, seed=0, deep=False)
    assert not rep.ok
    assert len(rep.mismatches) == 5
    assert all("toc" in m for m in rep.mismatches)


def test_tampered_certificates_are_reported(monkeypatch):
    monkeypatch.setattr(harness, "replay_certificate", lambda sys, cert, tol=None: False)
    rep = harness.cross_validate(10, seed=2, deep=False)
    assert rep.failures and not rep.mismatches
