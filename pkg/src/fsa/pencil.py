"""Exact rank profile of a linear matrix pencil ``lam*E - G`` over the complex numbers.

The rank of a pencil equals its generic rank except at finitely many points,
all roots of any nonzero maximal minor.  We evaluate one such minor by
interpolation, factor it over the rationals, and test each root exactly:
rational roots by substitution, irrational ones by elimination in the number
field generated by the root.  Galois conjugates share the same rank, so one
computation per irreducible factor covers all of its roots.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import poly
from .errors import ShapeError
from .ratlin import RationalMatrix, independent_rows, rank, solve


@dataclass(frozen=True)
class RankDrop:
    """A point set (roots of ``factor``) where the pencil loses rank."""

    factor: poly.Poly
    rank: int

    @property
    def roots(self) -> list[complex]:
        return poly.numeric_roots(self.factor)


@dataclass(frozen=True)
class PencilProfile:
    generic_rank: int
    drops: tuple[RankDrop, ...]

    def constant_rank(self) -> bool:
        return not self.drops

    def rank_everywhere_equals(self, target: int) -> bool:
        return self.generic_rank == target and not self.drops


def evaluate(E: RationalMatrix, G: RationalMatrix, lam) -> RationalMatrix:
    lam = Fraction(lam)
    return RationalMatrix._trusted(
        tuple(tuple(lam * e - g for e, g in zip(re, rg)) for re, rg in zip(E.rows, G.rows)), E.ncols
    )


def field_rank(rows: list[list]) -> int:
    """Rank by plain Gaussian elimination over any exact field."""
    rows = [list(r) for r in rows]
    if not rows:
        return 0
    ncols = len(rows[0])
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = 1 / rows[r][c]
        for i in range(r + 1, len(rows)):
            f = rows[i][c]
            if f:
                f = f * inv
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        r += 1
        if r == len(rows):
            break
    return r


def _minor_poly(E: RationalMatrix, G: RationalMatrix, I, J) -> poly.Poly:
    k = len(I)
    Es, Gs = E.submatrix(I, J), G.submatrix(I, J)
    from .ratlin import determinant

    pts = [Fraction(t) for t in range(k + 1)]
    vals = [determinant(evaluate(Es, Gs, t)) for t in pts]
    vander = RationalMatrix([[t**i for i in range(k + 1)] for t in pts])
    coeffs = solve(vander, RationalMatrix.column(vals))
    return poly.trim(coeffs.col(0))


def pencil_profile(E: RationalMatrix, G: RationalMatrix) -> PencilProfile:
    """Generic rank of ``lam*E - G`` and every point where the rank drops."""
    if E.shape != G.shape:
        raise ShapeError(f"pencil halves differ in shape: {E.shape} vs {G.shape}")
    k = min(E.shape)
    if k == 0:
        return PencilProfile(0, ())
    # at most k points can be rank deficient, so k+1 probes find the generic rank
    best, best_at = -1, None
    for t in range(k + 1):
        rk = rank(evaluate(E, G, t))
        if rk > best:
            best, best_at = rk, t
    if best == 0:
        return PencilProfile(0, ())
    P = evaluate(E, G, best_at)
    I = independent_rows(P)
    J = independent_rows(P.select_rows(I).T)
    d = _minor_poly(E, G, I, J)
    drops = []
    roots, factors = poly.factor(d)
    for root, _ in roots:
        rk = rank(evaluate(E, G, root))
        if rk < best:
            drops.append(RankDrop(poly.linear(root), rk))
    for q, _ in factors:
        K = poly.NumberField(q)
        a = K.generator
        rows = [[a * e - g for e, g in zip(re, rg)] for re, rg in zip(E.rows, G.rows)]
        rk = field_rank(rows)
        if rk < best:
            drops.append(RankDrop(q, rk))
    return PencilProfile(best, tuple(drops))


def rank_everywhere(E: RationalMatrix, G: RationalMatrix, target: int) -> bool:
    """True iff ``rank(lam*E - G) == target`` for every complex ``lam``."""
    return pencil_profile(E, G).rank_everywhere_equals(target)
