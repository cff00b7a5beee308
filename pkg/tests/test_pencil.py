from functools import reduce
from itertools import combinations

import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from fsa import poly
from fsa.pencil import field_rank, pencil_profile, rank_everywhere
from fsa.ratlin import RationalMatrix

from oracles import to_sympy

lam = sp.Symbol("lam")


def _reference(E, G):
    """Generic rank and the squarefree polynomial of rank-drop points."""
    P = lam * to_sympy(E) - to_sympy(G)
    r = P.rank()
    if r == 0:
        return 0, sp.Poly(1, lam)
    minors = [
        sp.Poly(sp.expand(P.extract(list(I), list(J)).det()), lam)
        for I in combinations(range(P.rows), r)
        for J in combinations(range(P.cols), r)
    ]
    g = reduce(sp.gcd, [m for m in minors if not m.is_zero])
    return r, sp.Poly(sp.sqf_part(g.as_expr()), lam).monic() if g.degree() > 0 else sp.Poly(1, lam)


def pencils():
    def build(shape):
        r, c = shape
        mat = st.lists(st.lists(st.integers(-2, 2), min_size=c, max_size=c), min_size=r, max_size=r)
        return st.tuples(mat, mat).map(lambda t: (RationalMatrix(t[0]), RationalMatrix(t[1])))

    return st.tuples(st.integers(1, 3), st.integers(1, 3)).flatmap(build)


@settings(max_examples=60, deadline=None)
@given(pencils())
def test_profile_matches_minor_gcd(pair):
    E, G = pair
    prof = pencil_profile(E, G)
    r, drop_poly = _reference(E, G)
    assert prof.generic_rank == r
    got = sp.Poly(1, lam)
    for d in prof.drops:
        assert d.rank < r
        got *= sp.Poly(sum(sp.Rational(c.numerator, c.denominator) * lam**i for i, c in enumerate(d.factor)), lam)
    assert sp.expand(got.monic().as_expr() - drop_poly.as_expr()) == 0


def test_identity_pencil_drops_at_eigenvalues():
    # lam I - diag(1, 2): full rank except at 1 and 2
    E = RationalMatrix.identity(2)
    G = RationalMatrix([[1, 0], [0, 2]])
    prof = pencil_profile(E, G)
    assert prof.generic_rank == 2
    assert sorted(d.factor for d in prof.drops) == sorted([poly.linear(1), poly.linear(2)])
    assert not rank_everywhere(E, G, 2)


def test_irrational_drop_detected_in_number_field():
    # lam I - [[0, 2], [1, 0]] is singular at +- sqrt 2
    E = RationalMatrix.identity(2)
    G = RationalMatrix([[0, 2], [1, 0]])
    prof = pencil_profile(E, G)
    assert [(d.factor, d.rank) for d in prof.drops] == [(poly.trim([-2, 0, 1]), 1)]


def test_tall_pencil_with_constant_rank():
    # [lam I - A; C] for an observable pair keeps full column rank
    E = RationalMatrix([[1, 0], [0, 1], [0, 0]])
    G = RationalMatrix([[0, 1], [0, 0], [-1, 0]])
    assert rank_everywhere(E, G, 2)


def test_field_rank_over_rationals():
    K = poly.NumberField(poly.trim([-2, 0, 1]))
    a = K.generator
    assert field_rank([[a, K(2)], [K(1), a]]) == 1
    assert field_rank([[a, K(1)], [K(1), a]]) == 2
