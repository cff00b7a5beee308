from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fsa import fixtures, harness, poly, synth
from fsa.errors import (
    ConditionsNotMet,
    FbarNotObservableFunctional,
    FNotFullRowRank,
    MultiInputUnsupported,
    NotFO,
    NotIFC,
    ShapeError,
)
from fsa.proptests import Path, SystemQuadruple, test_fo, test_ifc
from fsa.ratlin import RationalMatrix, rank, vstack

import oracles


def M(rows):
    return RationalMatrix(rows)


def example_three_with(C):
    s = fixtures.system("example3")
    return SystemQuadruple(s.A, s.F, s.B, M(C))


def test_r1_of_example_three():
    s = fixtures.system("example3")
    R1 = synth.construct_R1(s.A, s.F)
    assert R1 == M([[0, 1, 0, 0]])
    Fbar = vstack(s.F, R1)
    assert synth.verify_controller_conditions(s.A, s.B, Fbar) == (True, True)


def test_r1_rejects_rank_deficient_functional():
    with pytest.raises(FNotFullRowRank):
        synth.construct_R1(M([[1, 0], [0, 1]]), M([[1, 1], [2, 2]]))


def test_synthesis_on_observable_example_three():
    res = synth.gsp_synthesize(example_three_with([[1, 0, 0, 0], [0, 0, 1, 0]]))
    assert res.d == 2
    assert res.controller.invariance_ranks == (2, 2)
    assert res.observer.stacked and res.observer.pencil
    # full observability means every state is reconstructible, R2 fills the rest
    assert res.decomposition.h == 4
    assert rank(vstack(res.Fbar, res.R2)) == 4
    assert res.asymptotic_ok


def test_synthesis_with_partial_observation_needs_no_r2():
    res = synth.gsp_synthesize(example_three_with([[1, 0, 0, 0]]))
    assert res.decomposition.h == 2
    assert res.R2.nrows == 0
    d = res.decomposition
    At = d.T_inv @ fixtures.system("example3").A @ d.T
    assert At.submatrix(range(2), range(2, 4)).is_zero()


def test_synthesis_refuses_example_two():
    s = fixtures.system("example2")
    with pytest.raises(NotIFC) as info:
        synth.gsp_synthesize(SystemQuadruple(s.A, s.F, s.B, M([[1, 0]])))
    assert info.value.verdict.certificates


def test_synthesis_refuses_unobservable_functional():
    s = fixtures.system("example3")
    with pytest.raises(NotFO):
        synth.gsp_synthesize(SystemQuadruple(s.A, s.F, s.B, M([[0, 0, 1, 0]])))


def test_reduced_pair_conditions_are_weaker_than_ifc():
    # F picks x1; both states are driven equally, but only the sum is reachable
    A, B, F = RationalMatrix.identity(2), M([[1], [1]]), M([[1, 0]])
    s = SystemQuadruple(A, F, B)
    Fbar = vstack(F, synth.construct_R1(A, F))
    assert synth.verify_controller_conditions(A, B, Fbar) == (True, True)
    assert not test_ifc(s).holds
    assert not oracles.properties(A, B, None, F)["ifc"]


def test_observer_pencil_condition_can_fail_alone():
    A, C, F = M([[1, 0], [0, 2]]), M([[1, 0]]), M([[0, 1]])
    assert synth.verify_observer_conditions(A, C, F, None) == (True, False)
    r = synth.observer_receipt(A, C, F, None)
    assert r.drop_points == ("s - 2",)


def test_decomposition_blocks_are_zero_where_required():
    A = M([[1, 1, 0], [0, 2, 0], [1, 0, 3]])
    C = M([[1, 0, 0]])
    d = synth.observability_decomposition(A, C, M([[1, 0, 0]]))
    At = d.T_inv @ A @ d.T
    assert At.submatrix(range(d.h), range(d.h, 3)).is_zero()
    assert (C @ d.T).select_cols(range(d.h, 3)).is_zero()
    with pytest.raises(FbarNotObservableFunctional):
        synth.observability_decomposition(A, C, M([[0, 0, 1]]))


def test_gain_places_poles_exactly():
    s = fixtures.system("example3")
    Fbar = vstack(s.F, synth.construct_R1(s.A, s.F))
    Z = synth.design_feedback_gain(s.A, s.B, Fbar, [-1, -2])
    assert synth.closed_loop_char_poly(s.A, s.B, Fbar, Z) == poly.from_roots([-1, -2])


def test_gain_accepts_rational_poles():
    s = fixtures.system("example3")
    Fbar = vstack(s.F, synth.construct_R1(s.A, s.F))
    poles = [Fraction(-1, 3), Fraction(-5, 2)]
    Z = synth.design_feedback_gain(s.A, s.B, Fbar, poles)
    assert synth.closed_loop_char_poly(s.A, s.B, Fbar, Z) == poly.from_roots(poles)


def test_gain_errors():
    s = fixtures.system("example3")
    Fbar = vstack(s.F, synth.construct_R1(s.A, s.F))
    with pytest.raises(ShapeError):
        synth.design_feedback_gain(s.A, s.B, Fbar, [-1])
    B2 = M([[0, 1], [1, 0], [0, 0], [0, 0]])
    with pytest.raises(MultiInputUnsupported):
        synth.design_feedback_gain(s.A, B2, Fbar, [-1, -2])
    e2 = fixtures.system("example2")
    with pytest.raises(ConditionsNotMet):
        synth.design_feedback_gain(e2.A, e2.B, vstack(e2.F, synth.construct_R1(e2.A, e2.F)), [-1, -2])


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_synthesis_verifies_on_fuzzed_systems(index):
    spec, s = harness.system_for_index(5, index, harness.SizeBounds())
    if not (test_ifc(s, Path.ORACLE).holds and test_fo(s, Path.ORACLE).holds):
        return
    res = synth.gsp_synthesize(s)
    assert synth.verify_controller_conditions(s.A, s.B, res.Fbar) == (True, True)
    assert synth.verify_observer_conditions(s.A, s.C, s.F, res.R) == (True, True)
