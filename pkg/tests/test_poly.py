from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from fsa import poly

coeff = st.fractions(min_value=-6, max_value=6, max_denominator=3)
polys = st.lists(coeff, min_size=1, max_size=6).map(poly.trim).filter(bool)
s = sp.Symbol("s")


def as_sympy(p):
    return sp.Poly(sum(sp.Rational(c.numerator, c.denominator) * s**i for i, c in enumerate(p)), s)


@settings(max_examples=80, deadline=None)
@given(polys, polys)
def test_division_identity(p, q):
    quo, rem = poly.divmod_poly(p, q)
    assert poly.add(poly.mul(quo, q), rem) == p
    assert poly.degree(rem) < poly.degree(q)


@settings(max_examples=60, deadline=None)
@given(polys, polys)
def test_gcd_matches_sympy(p, q):
    g = poly.gcd(p, q)
    assert as_sympy(g).monic() == sp.gcd(as_sympy(p), as_sympy(q)).monic()


@settings(max_examples=60, deadline=None)
@given(st.lists(st.fractions(min_value=-4, max_value=4, max_denominator=3), min_size=1, max_size=5), polys)
def test_rational_roots_found_with_multiplicity(roots, extra):
    p = poly.mul(poly.from_roots(roots), extra)
    found = dict(poly.factor(p)[0])
    for r in set(roots):
        assert found.get(r, 0) >= roots.count(r)
    for r in found:
        assert poly.evaluate(p, r) == 0


@settings(max_examples=40, deadline=None)
@given(polys)
def test_factor_reassembles(p):
    roots, factors = poly.factor(p)
    prod = (p[-1],)
    for r, k in roots:
        for _ in range(k):
            prod = poly.mul(prod, poly.linear(r))
    for q, k in factors:
        assert poly.degree(q) >= 2
        for _ in range(k):
            prod = poly.mul(prod, q)
    assert prod == p


def test_rational_roots_of_scaled_cubic():
    # 6s^3 - 5s^2 - 2s + 1 = (s - 1)(2s + 1)(3s - 1)
    p = poly.trim([1, -2, -5, 6])
    assert poly.rational_roots(p) == [Fraction(-1, 2), Fraction(1, 3), Fraction(1)]


def test_irrational_factor_is_kept_whole():
    roots, factors = poly.factor(poly.trim([-2, 0, 1]))
    assert roots == [] and factors == [(poly.trim([-2, 0, 1]), 1)]


def test_zero_polynomial_has_no_root_list():
    with pytest.raises(ValueError):
        poly.rational_roots(())


def test_number_field_arithmetic_sqrt2():
    K = poly.NumberField(poly.trim([-2, 0, 1]))
    a = K.generator
    assert a * a == K(2)
    inv = (a + 1).inverse()
    assert inv * (a + 1) == K(1)
    assert inv == a - 1
    assert not (a * a - 2)


def test_number_field_inverse_of_zero_raises():
    K = poly.NumberField(poly.trim([1, 1, 1]))
    with pytest.raises(ZeroDivisionError):
        K(0).inverse()


def test_evaluate_in_number_field_gives_zero_at_root():
    q = poly.trim([-1, -1, 1])
    K = poly.NumberField(q)
    assert not poly.evaluate(q, K.generator)


def test_to_str():
    assert poly.to_str(poly.trim([2, 3, 1])) == "s^2 + 3*s + 2"
    assert poly.to_str(poly.trim([0, -1])) == "-s"
    assert poly.to_str(()) == "0"


def test_derivative_and_degree():
    p = poly.from_roots([1, 1, 2])
    assert poly.degree(p) == 3
    assert poly.evaluate(poly.derivative(p), 1) == 0
    assert poly.degree(()) == -1
