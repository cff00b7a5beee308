"""Eigenvalues, generalized eigenspaces and Jordan chains.

Rational eigenvalues are handled exactly.  Roots of irreducible factors of
degree two or more are approximated in floating point and flagged as
numeric; routines that need exact input refuse them.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import poly
from .errors import MixedStabilitySplit, NotAnEigenvalue, NumericEigenvalueUnsupportedExact, ShapeError
from .ratlin import (
    IncrementalBasis,
    RationalMatrix,
    Subspace,
    nullspace,
    rank,
    shift,
    subspace_intersect,
    vstack,
)

DEFAULT_RANK_TOL = 1e-9


@dataclass(frozen=True)
class Tolerances:
    """Tolerances for the floating point fallback.

    Attributes
    ----------
    rank_tol : float
        Relative singular value threshold; a singular value counts as zero
        when it is below ``rank_tol * max(shape) * sigma_max``.
    stab_tol : float
        Numeric eigenvalues with real part at least ``-stab_tol`` count as
        unstable.  Exact eigenvalues always use ``Re >= 0``.
    """

    rank_tol: float = DEFAULT_RANK_TOL
    stab_tol: float = 0.0


DEFAULT_TOLERANCES = Tolerances()


class Exactness(str, enum.Enum):
    EXACT = "exact"
    NUMERIC = "numeric"


@dataclass(frozen=True)
class Eigenvalue:
    """An eigenvalue together with its algebraic multiplicity.

    ``factor`` is the monic minimal polynomial of the value over the
    rationals; for exact eigenvalues it is linear.
    """

    value: Fraction | complex
    alg_mult: int
    exactness: Exactness
    factor: tuple = ()
    rank_tol: float | None = None

    @property
    def exact(self) -> bool:
        return self.exactness is Exactness.EXACT

    @property
    def real(self):
        return self.value if self.exact else self.value.real

    def is_unstable(self, stab_tol: float = 0.0) -> bool:
        if self.exact:
            return self.value >= 0
        return self.value.real >= -stab_tol

    def __str__(self):
        if self.exact:
            return str(self.value)
        z = self.value
        return f"{z.real:.12g}{z.imag:+.12g}j"


def char_poly(A: RationalMatrix) -> poly.Poly:
    """Characteristic polynomial ``det(sI - A)`` by the Faddeev-LeVerrier recurrence.

    Returns ascending coefficients; the result is monic of degree ``n``.

    Examples
    --------
    >>> char_poly(RationalMatrix([[2, 0], [0, 3]]))
    (Fraction(6, 1), Fraction(-5, 1), Fraction(1, 1))
    """
    return _char_poly(A)


@lru_cache(maxsize=1024)
def _char_poly(A: RationalMatrix) -> poly.Poly:
    n = A.nrows
    if A.ncols != n:
        raise ShapeError("characteristic polynomial needs a square matrix")
    c = [Fraction(0)] * (n + 1)
    c[n] = Fraction(1)
    AM = RationalMatrix.zeros(n, n)
    eye = RationalMatrix.identity(n)
    for k in range(1, n + 1):
        Mk = AM + eye * c[n - k + 1]
        AM = A @ Mk
        c[n - k] = -sum(AM[i, i] for i in range(n)) / k
    return tuple(c)


@lru_cache(maxsize=1024)
def eigenvalues(A: RationalMatrix, rank_tol: float = DEFAULT_RANK_TOL) -> tuple[Eigenvalue, ...]:
    """All eigenvalues of ``A`` with algebraic multiplicities.

    Rational roots come first in ascending order and are exact.  Roots of
    irreducible factors follow, one numeric entry per root.
    """
    roots, factors = poly.factor(char_poly(A))
    out = [Eigenvalue(r, k, Exactness.EXACT, poly.linear(r)) for r, k in roots]
    for q, k in factors:
        for z in poly.numeric_roots(q):
            out.append(Eigenvalue(_snap(z), k, Exactness.NUMERIC, q, rank_tol))
    return tuple(out)


def _snap(z: complex) -> complex:
    # roots of rational polynomials on the imaginary axis come back from the
    # root finder with a real part at rounding level; put them on the axis
    scale_ = 1.0 + abs(z)
    re, im = z.real, z.imag
    if abs(re) <= 1e-12 * scale_:
        re = 0.0
    if abs(im) <= 1e-12 * scale_:
        im = 0.0
    return complex(re, im)


def exact_eigenvalue(A: RationalMatrix, value) -> Eigenvalue:
    """Look up the exact eigenvalue equal to ``value``."""
    value = Fraction(value)
    for ev in eigenvalues(A):
        if ev.exact and ev.value == value:
            return ev
    raise NotAnEigenvalue(f"{value} is not an eigenvalue")


def _require_exact(ev: Eigenvalue):
    if not ev.exact:
        raise NumericEigenvalueUnsupportedExact(f"eigenvalue {ev} is not rational")


def poly_of_matrix(p: poly.Poly, M: RationalMatrix) -> RationalMatrix:
    n = M.nrows
    acc = RationalMatrix.zeros(n, n)
    eye = RationalMatrix.identity(n)
    for c in reversed(p):
        acc = acc @ M + eye * c
    return acc


@lru_cache(maxsize=4096)
def generalized_eigenspace(M: RationalMatrix, ev: Eigenvalue) -> Subspace:
    """``ker((lambda I - M)^k)`` with ``k`` the algebraic multiplicity."""
    _require_exact(ev)
    space = nullspace(shift(M, ev.value) ** ev.alg_mult)
    if space.dim == 0:
        raise NotAnEigenvalue(f"{ev} is not an eigenvalue of the operator")
    return space


@lru_cache(maxsize=1024)
def factor_eigenspace(M: RationalMatrix, factor: tuple, mult: int) -> Subspace:
    """``ker(q(M)^mult)`` for a rational polynomial ``q``; a real invariant subspace."""
    return nullspace(poly_of_matrix(factor, M) ** mult)


def _grouped(M: RationalMatrix, tol: Tolerances):
    groups = {}
    for ev in eigenvalues(M, tol.rank_tol):
        groups.setdefault(ev.factor, []).append(ev)
    return groups


@lru_cache(maxsize=1024)
def _spectral_subspace(M: RationalMatrix, unstable: bool, tol: Tolerances) -> Subspace:
    n = M.nrows
    space = Subspace.zero(n)
    for factor_, evs in _grouped(M, tol).items():
        flags = {ev.is_unstable(tol.stab_tol) for ev in evs}
        if len(flags) > 1:
            raise MixedStabilitySplit(
                f"roots of {poly.to_str(factor_)} lie on both sides of the stability boundary"
            )
        if flags.pop() == unstable:
            space = space + factor_eigenspace(M, factor_, evs[0].alg_mult)
    return space


def unstable_eigenspace(M: RationalMatrix, tol: Tolerances = DEFAULT_TOLERANCES) -> Subspace:
    """Sum of the real generalized eigenspaces of eigenvalues with ``Re >= 0``.

    Raises
    ------
    MixedStabilitySplit
        If an irreducible factor has both stable and unstable roots, so no
        rational basis exists.  Use :func:`spectral_basis_numeric` then.
    """
    return _spectral_subspace(M, True, tol)


def stable_eigenspace(M: RationalMatrix, tol: Tolerances = DEFAULT_TOLERANCES) -> Subspace:
    """Counterpart of :func:`unstable_eigenspace` for ``Re < 0``."""
    return _spectral_subspace(M, False, tol)


@lru_cache(maxsize=1024)
def factor_closed_spectral_subspace(M: RationalMatrix, unstable: bool, tol: Tolerances = DEFAULT_TOLERANCES) -> Subspace:
    """Rational spectral subspace grouped by irreducible factor of the characteristic polynomial.

    With ``unstable`` true, the sum of ``ker q(M)^m`` over every factor ``q``
    with at least one root of ``Re >= 0``; otherwise the sum over factors
    whose roots are all stable.  The two are complementary and always
    rational.

    For any rational matrices ``D`` and ``G``, a statement such as "``G``
    annihilates the ``D``-hidden vectors at ``lam``" holds at one root of
    ``q`` exactly when it holds at all of them, because conjugating the
    root maps the relevant subspaces onto each other.  So replacing the
    unstable subspace by this factor-closed one leaves stabilizability and
    detectability verdicts unchanged while keeping them exact.
    """
    n = M.nrows
    space = Subspace.zero(n)
    for factor_, evs in _grouped(M, tol).items():
        hit = any(ev.is_unstable(tol.stab_tol) for ev in evs)
        if hit == unstable:
            space = space + factor_eigenspace(M, factor_, evs[0].alg_mult)
    return space


def spectral_basis_numeric(M: RationalMatrix, unstable: bool, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Orthonormal real basis of the unstable (or stable) invariant subspace.

    Uses an ordered real Schur form, so defective eigenvalues are fine.
    """
    from scipy.linalg import schur

    n = M.nrows
    if n == 0:
        return np.zeros((0, 0))

    def pick(re, im=None):
        val = re if im is None else complex(re, im).real
        is_unst = val >= -tol.stab_tol - 1e-12 * (1.0 + abs(val))
        return is_unst if unstable else not is_unst

    _, Z, sdim = schur(M.to_numpy(), output="real", sort=pick)
    return Z[:, :sdim]


# ---------------------------------------------------------------------------
# numeric helpers


def _num_tol(M: np.ndarray, eps: float, s: np.ndarray) -> float:
    return eps * max(M.shape) * (s[0] if s.size else 0.0)


def numeric_rank(M: np.ndarray, eps: float = DEFAULT_RANK_TOL) -> int:
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    return int((s > _num_tol(M, eps, s)).sum()) if s[0] > 0 else 0


def numeric_nullspace(M: np.ndarray, eps: float = DEFAULT_RANK_TOL) -> np.ndarray:
    n = M.shape[1]
    if M.shape[0] == 0 or n == 0:
        return np.eye(n, dtype=complex)
    _, s, vh = np.linalg.svd(M)
    r = numeric_rank(M, eps)
    return vh[r:].conj().T


def _ev_tol(ev: Eigenvalue, tol: Tolerances | None) -> float:
    if tol is not None:
        return tol.rank_tol
    return ev.rank_tol if ev.rank_tol is not None else DEFAULT_RANK_TOL


# ---------------------------------------------------------------------------
# Jordan chains


class OperatorTag(str, enum.Enum):
    OF_A = "A"
    OF_A_TRANSPOSE = "A^T"


@dataclass(frozen=True)
class JordanChain:
    """Generalized eigenvectors ``v1, ..., vq`` with ``(lam I - M) v_{i+1} = v_i``.

    Vectors are tuples of Fractions on the exact path and tuples of complex
    numbers on the numeric path.
    """

    eigenvalue: Eigenvalue
    vectors: tuple
    operator_tag: str = "M"

    @property
    def length(self) -> int:
        return len(self.vectors)

    @property
    def exact(self) -> bool:
        return self.eigenvalue.exact

    def matrix(self, upto: int | None = None) -> RationalMatrix:
        """Exact chain vectors ``v1..v_upto`` as matrix columns."""
        vecs = self.vectors[: self.length if upto is None else upto]
        n = len(self.vectors[0]) if self.vectors else 0
        return RationalMatrix.from_columns(vecs, n)

    def array(self, upto: int | None = None) -> np.ndarray:
        vecs = self.vectors[: self.length if upto is None else upto]
        n = len(self.vectors[0]) if self.vectors else 0
        if not vecs:
            return np.zeros((n, 0), dtype=complex)
        return np.array([[complex(x) for x in v] for v in vecs], dtype=complex).T


def _apply(M: RationalMatrix, v: Sequence[Fraction]) -> tuple[Fraction, ...]:
    return tuple(sum((a * b for a, b in zip(row, v)), Fraction(0)) for row in M.rows)


def jordan_chains(
    M: RationalMatrix,
    ev: Eigenvalue,
    within: Subspace | None = None,
    operator_tag: str = "M",
    tol: Tolerances | None = None,
) -> list[JordanChain]:
    """A complete Jordan basis of ``(M, ev)``, optionally inside an invariant subspace.

    Parameters
    ----------
    M : RationalMatrix
        Square operator.
    ev : Eigenvalue
        Eigenvalue of ``M``.  Numeric eigenvalues use a floating point
        version of the same construction.
    within : Subspace, optional
        A ``(lam I - M)``-invariant subspace; chains are then a Jordan basis
        of the restriction.  Defaults to the whole space.
    operator_tag : str
        Label recorded on the chains (``"A"`` or ``"A^T"``).

    Returns
    -------
    list of JordanChain
        Longest chains first.  Chain tops are chosen greedily from the
        canonical basis of each kernel level, which makes the result
        deterministic.

    Raises
    ------
    NotAnEigenvalue
        If ``lam I - M`` is nonsingular.
    """
    if not ev.exact:
        return _numeric_chains(M, ev, within, operator_tag, _ev_tol(ev, tol))
    return list(_exact_chains(M, ev, within, operator_tag))


@lru_cache(maxsize=4096)
def _exact_chains(M, ev, within, operator_tag):
    n = M.nrows
    N = shift(M, ev.value)
    kernels = [Subspace.zero(n)]
    P = RationalMatrix.identity(n)
    while True:
        P = P @ N
        K = nullspace(P)
        if within is not None:
            K = subspace_intersect(K, within)
        if K.dim == kernels[-1].dim:
            break
        kernels.append(K)
    if within is None and len(kernels) == 1:
        raise NotAnEigenvalue(f"{ev} is not an eigenvalue of the operator")
    tops: list[tuple[tuple, int]] = []
    for k in range(len(kernels) - 1, 0, -1):
        base = IncrementalBasis(n)
        for v in kernels[k - 1].vectors():
            base.add(v)
        for t, length in tops:
            v = t
            for _ in range(length - k):
                v = _apply(N, v)
            base.add(v)
        for cand in kernels[k].vectors():
            if base.add(cand):
                tops.append((cand, k))
    chains = []
    for t, length in tops:
        vecs = [t]
        for _ in range(length - 1):
            vecs.append(_apply(N, vecs[-1]))
        chains.append(JordanChain(ev, tuple(reversed(vecs)), operator_tag))
    return tuple(chains)


def _numeric_chains(M, ev, within, operator_tag, eps):
    n = M.nrows
    Mf = M.to_numpy(complex)
    N = ev.value * np.eye(n) - Mf
    if isinstance(within, Subspace):
        within = within.basis.to_numpy(complex)
    W = None if within is None else np.asarray(within, dtype=complex)
    kernels = [np.zeros((n, 0), dtype=complex)]
    P = np.eye(n, dtype=complex)
    for _ in range(n):
        P = P @ N
        K = numeric_nullspace(P, eps)
        if W is not None:
            # intersect with span(W): solve K a = W b
            ns = numeric_nullspace(np.hstack([K, -W]), eps)
            K = K @ ns[: K.shape[1]]
            if K.size:
                q, _ = np.linalg.qr(K)
                K = q[:, : numeric_rank(K, eps)]
        if K.shape[1] == kernels[-1].shape[1]:
            break
        kernels.append(K)
    if within is None and len(kernels) == 1:
        raise NotAnEigenvalue(f"{ev} is not an eigenvalue of the operator")
    tops = []
    for k in range(len(kernels) - 1, 0, -1):
        base = [kernels[k - 1]]
        for t, length in tops:
            base.append((np.linalg.matrix_power(N, length - k) @ t).reshape(n, 1))
        current = np.hstack(base)
        for j in range(kernels[k].shape[1]):
            cand = kernels[k][:, j : j + 1]
            trial = np.hstack([current, cand])
            if numeric_rank(trial, eps) > numeric_rank(current, eps):
                tops.append((cand[:, 0], k))
                current = trial
    chains = []
    for t, length in tops:
        vecs = [t]
        for _ in range(length - 1):
            vecs.append(N @ vecs[-1])
        chains.append(JordanChain(ev, tuple(tuple(complex(x) for x in v) for v in reversed(vecs)), operator_tag))
    return chains


def chain_relations_hold(chain: JordanChain, M: RationalMatrix, tol: float = 1e-7) -> bool:
    """Check ``N v1 = 0`` and ``N v_{i+1} = v_i`` (exactly, or to tolerance)."""
    if chain.exact:
        N = shift(M, chain.eigenvalue.value)
        prev = tuple(Fraction(0) for _ in range(M.nrows))
        for v in chain.vectors:
            if _apply(N, v) != prev:
                return False
            prev = tuple(v)
        return rank(chain.matrix()) == chain.length
    N = chain.eigenvalue.value * np.eye(M.nrows) - M.to_numpy(complex)
    X = chain.array()
    scale_ = max(1.0, np.abs(X).max())
    prev = np.zeros(M.nrows, dtype=complex)
    for i in range(chain.length):
        if np.abs(N @ X[:, i] - prev).max() > tol * scale_:
            return False
        prev = X[:, i]
    return numeric_rank(X) == chain.length


# ---------------------------------------------------------------------------
# visibility


@dataclass(frozen=True)
class VisibilityIndex:
    """First chain position detected by a matrix.

    ``j = q + 1`` means the matrix annihilates the whole chain; the witness
    is then ``None``.
    """

    chain: JordanChain
    matrix_tag: str
    j: int
    witness: tuple | None = None


def first_visible_index(
    chain: JordanChain, D: RationalMatrix, matrix_tag: str = "D", tol: float = DEFAULT_RANK_TOL
) -> VisibilityIndex:
    """Smallest ``i`` with ``D v_i != 0``, or ``q + 1`` if there is none."""
    if D.ncols != (len(chain.vectors[0]) if chain.vectors else D.ncols):
        raise ShapeError("detector width differs from chain vector length")
    if chain.exact:
        for i, v in enumerate(chain.vectors, start=1):
            w = _apply(D, v)
            if any(w):
                return VisibilityIndex(chain, matrix_tag, i, w)
        return VisibilityIndex(chain, matrix_tag, chain.length + 1, None)
    Df = D.to_numpy(complex)
    X = chain.array()
    scale_ = max(1.0, np.abs(Df).max() if Df.size else 1.0) * max(1.0, np.abs(X).max())
    for i in range(chain.length):
        w = Df @ X[:, i]
        if w.size and np.abs(w).max() > 1e3 * tol * scale_:
            return VisibilityIndex(chain, matrix_tag, i + 1, tuple(complex(x) for x in w))
    return VisibilityIndex(chain, matrix_tag, chain.length + 1, None)


def annihilated_stack(M: RationalMatrix, lam, D: RationalMatrix, level: int) -> RationalMatrix:
    """``[N^level; D; D N; ...; D N^(level-1)]`` with ``N = lam I - M``.

    Its kernel is the set of vectors of height at most ``level`` whose whole
    downward chain is annihilated by ``D``.
    """
    N = shift(M, lam)
    blocks = []
    P = RationalMatrix.identity(M.nrows)
    for _ in range(level):
        blocks.append(D @ P)
        P = N @ P
    return vstack(P, *blocks) if blocks else P


def annihilated_stack_numeric(M: RationalMatrix, lam: complex, D: RationalMatrix, level: int) -> np.ndarray:
    n = M.nrows
    N = lam * np.eye(n) - M.to_numpy(complex)
    Df = D.to_numpy(complex)
    blocks = []
    P = np.eye(n, dtype=complex)
    for _ in range(level):
        blocks.append(Df @ P)
        P = N @ P
    return np.vstack([P] + blocks)


@lru_cache(maxsize=4096)
def hidden_subspace(M: RationalMatrix, ev: Eigenvalue, D: RationalMatrix) -> Subspace:
    """Largest ``M``-invariant subspace of the generalized eigenspace inside ``ker D``.

    Equivalently, every vector whose full downward Jordan chain is
    annihilated by ``D``.  Exact eigenvalues only.
    """
    _require_exact(ev)
    return nullspace(annihilated_stack(M, ev.value, D, ev.alg_mult))


def hidden_subspace_numeric(M: RationalMatrix, ev: Eigenvalue, D: RationalMatrix, eps: float) -> np.ndarray:
    return numeric_nullspace(annihilated_stack_numeric(M, ev.value, D, ev.alg_mult), eps)


def hidden_chains(
    M: RationalMatrix, ev: Eigenvalue, D: RationalMatrix, operator_tag: str = "M", tol: Tolerances | None = None
) -> list[JordanChain]:
    """Jordan basis of the part of the generalized eigenspace invisible to ``D``."""
    if ev.exact:
        U = hidden_subspace(M, ev, D)
        if U.dim == 0:
            return []
        return jordan_chains(M, ev, within=U, operator_tag=operator_tag)
    eps = _ev_tol(ev, tol)
    U = hidden_subspace_numeric(M, ev, D, eps)
    if U.shape[1] == 0:
        return []
    return jordan_chains(M, ev, within=U, operator_tag=operator_tag, tol=Tolerances(eps))
