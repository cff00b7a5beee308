from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from fsa import poly
from fsa.errors import MixedStabilitySplit
from fsa.harness import JordanSpec, generate_system
from fsa.ratlin import RationalMatrix, Subspace, rank, shift, vstack
from fsa.spectra import (
    Exactness,
    char_poly,
    chain_relations_hold,
    eigenvalues,
    first_visible_index,
    generalized_eigenspace,
    hidden_chains,
    hidden_subspace,
    jordan_chains,
    numeric_rank,
    spectral_basis_numeric,
    stable_eigenspace,
    unstable_eigenspace,
)

from oracles import intersect, krylov, nullspace as sp_nullspace, to_sympy

EX1_A = RationalMatrix([[4, 0, -2, 7], [1, 2, 0, 2], [-1, 0, 4, -5], [-1, 1, 1, -1]])
EX1_B = RationalMatrix([[2], [1], [-1], [-1]])

small = st.integers(-3, 3)
square = st.integers(1, 4).flatmap(
    lambda n: st.lists(st.lists(small, min_size=n, max_size=n), min_size=n, max_size=n).map(RationalMatrix)
)
block_specs = st.lists(
    st.tuples(st.integers(-2, 2), st.lists(st.integers(1, 3), min_size=1, max_size=2)),
    min_size=1,
    max_size=3,
    unique_by=lambda b: b[0],
).filter(lambda bl: sum(sum(L) for _, L in bl) <= 6)


@settings(max_examples=60, deadline=None)
@given(square)
def test_char_poly_matches_sympy(A):
    s = sp.Symbol("s")
    expected = to_sympy(A).charpoly(s).all_coeffs()[::-1]
    assert char_poly(A) == tuple(Fraction(int(c.p), int(c.q)) for c in expected)


@settings(max_examples=40, deadline=None)
@given(square)
def test_eigenvalue_multiplicities_sum_to_dimension(A):
    evs = eigenvalues(A)
    assert sum(ev.alg_mult for ev in evs) == A.nrows
    exact = {ev.value: ev.alg_mult for ev in evs if ev.exact}
    for lam, mult in to_sympy(A).eigenvals().items():
        if lam.is_rational:
            assert exact[Fraction(int(lam.p), int(lam.q))] == mult


@settings(max_examples=40, deadline=None)
@given(block_specs, st.integers(0, 2**32))
def test_chains_reproduce_prescribed_jordan_structure(blocks, seed):
    spec = JordanSpec(tuple((ev, tuple(L)) for ev, L in blocks), seed)
    A = generate_system(spec, 1, 1, 1).A
    for ev in eigenvalues(A):
        chains = jordan_chains(A, ev)
        want = sorted(L for e, Ls in spec.blocks if e == ev.value for L in Ls)
        assert sorted(c.length for c in chains) == want
        assert all(chain_relations_hold(c, A) for c in chains)
        vecs = [v for c in chains for v in c.vectors]
        assert rank(RationalMatrix.from_columns(vecs, A.nrows)) == ev.alg_mult


def test_chain_lengths_agree_with_sympy_jordan_form():
    _, J = to_sympy(EX1_A).jordan_form()
    assert sorted(J.diagonal()) == [2, 2, 2, 3]
    ev2 = eigenvalues(EX1_A)[0]
    assert [c.length for c in jordan_chains(EX1_A, ev2)] == [3]


def test_example_one_chain_visibility():
    # [DERIVED] first vector of the lambda=2 chain of A^T is hidden from B^T, the second is not
    ev2, ev3 = eigenvalues(EX1_A)
    (chain,) = jordan_chains(EX1_A.T, ev2)
    vis = first_visible_index(chain, EX1_B.T)
    assert vis.j == 2
    assert vis.witness != (0,)
    (chain3,) = jordan_chains(EX1_A.T, ev3)
    assert first_visible_index(chain3, EX1_B.T).j == 1


def test_visibility_index_past_the_end_when_hidden():
    A = RationalMatrix([[0, 1], [0, 0]])
    ev = eigenvalues(A)[0]
    (chain,) = jordan_chains(A, ev)
    assert first_visible_index(chain, RationalMatrix([[0, 0]])).j == 3


@settings(max_examples=40, deadline=None)
@given(block_specs, st.integers(0, 2**32))
def test_hidden_subspace_is_largest_invariant_part_in_kernel(blocks, seed):
    spec = JordanSpec(tuple((ev, tuple(L)) for ev, L in blocks), seed)
    sys = generate_system(spec, 1, 1, 1)
    M, D = sys.A.T, sys.B.T
    for ev in eigenvalues(sys.A):
        U = hidden_subspace(M, ev, D)
        # reference: unobservable subspace of (M, D) inside the generalized eigenspace
        Ms, Ds = to_sympy(M), to_sympy(D)
        unobs = sp_nullspace(krylov(Ms.T, Ds.T).T)
        gen = sp_nullspace((Ms - ev.value * sp.eye(M.nrows)) ** ev.alg_mult)
        assert U.dim == intersect(unobs, gen).shape[1]
        assert U.is_invariant(M)
        chains = hidden_chains(M, ev, D)
        assert sum(c.length for c in chains) == U.dim
        for c in chains:
            assert all(not any(x for row in (D @ RationalMatrix.column(v)).rows for x in row) for v in c.vectors)


def test_hidden_chain_of_example_one():
    # [DERIVED] the B^T-hidden part at lambda=2 is spanned by (1, -1, 1, 0)
    ev2 = eigenvalues(EX1_A)[0]
    (chain,) = hidden_chains(EX1_A.T, ev2, EX1_B.T)
    assert chain.length == 1
    v = chain.vectors[0]
    assert Subspace.span_vectors([v], 4) == Subspace.span_vectors([(1, -1, 1, 0)], 4)


def test_generalized_eigenspace_dimension():
    ev2 = eigenvalues(EX1_A)[0]
    assert generalized_eigenspace(EX1_A, ev2).dim == 3


def test_unstable_and_stable_parts_split_the_space():
    A = RationalMatrix([[1, 0, 0], [0, -2, 1], [0, 0, -2]])
    assert unstable_eigenspace(A).dim == 1
    assert stable_eigenspace(A).dim == 2


def test_zero_counts_as_unstable():
    A = RationalMatrix([[0, 0], [0, -1]])
    assert unstable_eigenspace(A) == Subspace.span_vectors([(1, 0)], 2)


def test_irrational_spectrum_uses_numeric_path():
    A = RationalMatrix([[0, 2], [1, 0]])
    evs = eigenvalues(A)
    assert [ev.exactness for ev in evs] == [Exactness.NUMERIC] * 2
    assert np.allclose(sorted(ev.value.real for ev in evs), [-np.sqrt(2), np.sqrt(2)])
    for ev in evs:
        (chain,) = jordan_chains(A, ev)
        assert chain_relations_hold(chain, A)
    # both roots share one irreducible factor on opposite sides of zero
    with pytest.raises(MixedStabilitySplit):
        unstable_eigenspace(A)
    X = spectral_basis_numeric(A, True)
    assert X.shape == (2, 1)
    assert np.allclose(A.to_numpy() @ X, np.sqrt(2) * X)


def test_irreducible_factor_on_one_side_stays_exact():
    # s^2 + 4s + 2 has both roots -2 +- sqrt 2 negative, so no numeric split is needed
    A = RationalMatrix([[0, -2], [1, -4]])
    assert unstable_eigenspace(A).dim == 0
    assert stable_eigenspace(A).dim == 2


def test_complex_pair_on_imaginary_axis_is_unstable():
    A = RationalMatrix([[0, -1], [1, 0]])
    assert unstable_eigenspace(A).dim == 2


def test_numeric_rank_threshold_is_relative():
    M = np.diag([1.0, 1e-12])
    assert numeric_rank(M, 1e-9) == 1
    assert numeric_rank(M * 1e6, 1e-9) == 1
    assert numeric_rank(M, 1e-14) == 2


def test_char_poly_of_generated_system_is_prescribed():
    spec = JordanSpec(((2, (3,)), (3, (1,))), seed=11)
    A = generate_system(spec, 1, 1, 1).A
    assert char_poly(A) == poly.mul(poly.from_roots([2, 2, 2]), poly.linear(3))


def test_chain_inside_invariant_subspace():
    A = RationalMatrix([[2, 1, 0], [0, 2, 0], [0, 0, 2]])
    ev = eigenvalues(A)[0]
    W = Subspace.span_vectors([(1, 0, 0), (0, 1, 0)], 3)
    (chain,) = jordan_chains(A, ev, within=W)
    assert chain.length == 2
    N = shift(A, 2)
    assert (N @ chain.matrix(1)).is_zero()
    assert rank(vstack(chain.matrix().T, RationalMatrix([[0, 0, 1]]))) == 3
