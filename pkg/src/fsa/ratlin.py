"""Exact dense linear algebra over the rationals.

Every matrix entry is a :class:`fractions.Fraction`.  Rank and echelon work
clear denominators row by row and run fraction-free Bareiss elimination on
Python integers, so intermediate values stay small and no rounding ever
occurs.  Subspaces are stored by a canonical basis, which makes equality a
plain comparison.
"""

from __future__ import annotations

import math
import numbers
import re
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .errors import NotFullRowRank, ShapeError

_DECIMAL = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")
_RATIO = re.compile(r"^\s*[+-]?\d+\s*/\s*[+-]?\d+\s*$")


def to_rational(value) -> Fraction:
    """Convert an integer, Fraction, or ``"p/q"`` / decimal string to a Fraction.

    Binary floats are rejected because their exact value is rarely the one
    the user meant.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not matrix entries")
    if isinstance(value, numbers.Integral):
        return Fraction(int(value))
    if isinstance(value, numbers.Rational):
        return Fraction(int(value.numerator), int(value.denominator))
    if isinstance(value, str):
        text = value.strip()
        if _RATIO.match(text):
            num, den = text.split("/")
            if int(den) == 0:
                raise ValueError(f"zero denominator in {value!r}")
            return Fraction(int(num), int(den))
        if _DECIMAL.match(text):
            return Fraction(text)
        raise ValueError(f"not a rational number: {value!r}")
    if isinstance(value, float):
        raise TypeError(f"float entry {value!r}; write it as a decimal or 'p/q' string")
    raise TypeError(f"unsupported entry type {type(value).__name__}")


def format_rational(q: Fraction) -> str:
    """Serialize as ``"p/q"`` (or ``"p"`` for integers)."""
    return str(q)


class RationalMatrix:
    """Immutable dense matrix of Fractions.

    Parameters
    ----------
    rows : sequence of sequences
        Row-major entries.  Anything accepted by :func:`to_rational`.
    ncols : int, optional
        Column count; required when ``rows`` is empty.
    """

    __slots__ = ("_rows", "_shape", "_hash", "_ints")

    def __init__(self, rows: Iterable[Iterable] = (), ncols: int | None = None):
        data = tuple(tuple(to_rational(x) for x in r) for r in rows)
        if data:
            widths = {len(r) for r in data}
            if len(widths) != 1:
                raise ShapeError("rows have different lengths")
            width = widths.pop()
            if ncols is not None and ncols != width:
                raise ShapeError(f"declared {ncols} columns but rows have {width}")
        else:
            width = 0 if ncols is None else ncols
        if width < 0:
            raise ShapeError("negative column count")
        self._rows = data
        self._shape = (len(data), width)
        self._hash = None
        self._ints = None

    @classmethod
    def _trusted(cls, rows: tuple, ncols: int) -> "RationalMatrix":
        m = object.__new__(cls)
        m._rows = rows
        m._shape = (len(rows), ncols)
        m._hash = None
        m._ints = None
        return m

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "RationalMatrix":
        z = Fraction(0)
        return cls._trusted(tuple((z,) * ncols for _ in range(nrows)), ncols)

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        one, z = Fraction(1), Fraction(0)
        return cls._trusted(tuple(tuple(one if i == j else z for j in range(n)) for i in range(n)), n)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], nrows: int | None = None) -> "RationalMatrix":
        cols = [tuple(to_rational(x) for x in c) for c in columns]
        if not cols:
            return cls.zeros(0 if nrows is None else nrows, 0)
        height = len(cols[0])
        if any(len(c) != height for c in cols) or (nrows is not None and nrows != height):
            raise ShapeError("columns have different lengths")
        return cls._trusted(tuple(zip(*cols)), len(cols)) if height else cls.zeros(0, len(cols))

    @classmethod
    def column(cls, values: Sequence) -> "RationalMatrix":
        return cls([[v] for v in values], ncols=1)

    @classmethod
    def row(cls, values: Sequence) -> "RationalMatrix":
        vals = list(values)
        return cls([vals], ncols=len(vals))

    @property
    def shape(self) -> tuple[int, int]:
        return self._shape

    @property
    def nrows(self) -> int:
        return self._shape[0]

    @property
    def ncols(self) -> int:
        return self._shape[1]

    @property
    def rows(self) -> tuple[tuple[Fraction, ...], ...]:
        return self._rows

    def columns(self) -> list[tuple[Fraction, ...]]:
        if not self._rows:
            return [() for _ in range(self.ncols)]
        return list(zip(*self._rows))

    def col(self, j: int) -> tuple[Fraction, ...]:
        return tuple(r[j] for r in self._rows)

    def __getitem__(self, idx):
        i, j = idx
        return self._rows[i][j]

    @property
    def T(self) -> "RationalMatrix":
        return RationalMatrix._trusted(tuple(self.columns()), self.nrows)

    def _integer_form(self):
        """Integer matrix ``N`` and denominator ``d`` with ``self == N / d``."""
        if self._ints is None:
            den = 1
            for r in self._rows:
                for x in r:
                    if x.denominator != 1:
                        den = den * x.denominator // math.gcd(den, x.denominator)
            ints = tuple(tuple(int(x * den) for x in r) for r in self._rows)
            self._ints = (ints, den)
        return self._ints

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        if self.ncols != other.nrows:
            raise ShapeError(f"cannot multiply {self.shape} by {other.shape}")
        a, da = self._integer_form()
        b, db = other._integer_form()
        den = da * db
        cols = list(zip(*b)) if b else [() for _ in range(other.ncols)]
        out = []
        for ra in a:
            if den == 1:
                out.append(tuple(Fraction(sum(x * y for x, y in zip(ra, cb))) for cb in cols))
            else:
                out.append(tuple(Fraction(sum(x * y for x, y in zip(ra, cb)), den) for cb in cols))
        return RationalMatrix._trusted(tuple(out), other.ncols)

    def _check_same(self, other):
        if not isinstance(other, RationalMatrix) or other.shape != self.shape:
            raise ShapeError(f"shape mismatch: {self.shape} vs {getattr(other, 'shape', None)}")

    def __add__(self, other):
        self._check_same(other)
        return RationalMatrix._trusted(
            tuple(tuple(x + y for x, y in zip(r, s)) for r, s in zip(self._rows, other._rows)), self.ncols
        )

    def __sub__(self, other):
        self._check_same(other)
        return RationalMatrix._trusted(
            tuple(tuple(x - y for x, y in zip(r, s)) for r, s in zip(self._rows, other._rows)), self.ncols
        )

    def __neg__(self):
        return RationalMatrix._trusted(tuple(tuple(-x for x in r) for r in self._rows), self.ncols)

    def __mul__(self, scalar):
        if isinstance(scalar, RationalMatrix):
            return NotImplemented
        s = to_rational(scalar)
        return RationalMatrix._trusted(tuple(tuple(x * s for x in r) for r in self._rows), self.ncols)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "RationalMatrix":
        return matrix_power(self, k)

    def __eq__(self, other):
        return isinstance(other, RationalMatrix) and self._shape == other._shape and self._rows == other._rows

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self._shape, self._rows))
        return self._hash

    def __repr__(self):
        body = ", ".join("[" + ", ".join(str(x) for x in r) + "]" for r in self._rows)
        return f"RationalMatrix([{body}], ncols={self.ncols})"

    def is_zero(self) -> bool:
        return all(x == 0 for r in self._rows for x in r)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "RationalMatrix":
        return RationalMatrix._trusted(tuple(tuple(self._rows[i][j] for j in cols) for i in rows), len(cols))

    def select_rows(self, rows: Sequence[int]) -> "RationalMatrix":
        return RationalMatrix._trusted(tuple(self._rows[i] for i in rows), self.ncols)

    def select_cols(self, cols: Sequence[int]) -> "RationalMatrix":
        return RationalMatrix._trusted(tuple(tuple(r[j] for j in cols) for r in self._rows), len(cols))

    def to_strings(self) -> list[list[str]]:
        return [[format_rational(x) for x in r] for r in self._rows]

    def to_numpy(self, dtype=float):
        import numpy as np

        return np.array([[float(x) for x in r] for r in self._rows], dtype=dtype).reshape(self.shape)


def as_matrix(value) -> RationalMatrix:
    return value if isinstance(value, RationalMatrix) else RationalMatrix(value)


def hstack(*mats: RationalMatrix) -> RationalMatrix:
    """Horizontal concatenation; zero-column blocks are neutral."""
    mats = [m for m in mats if m is not None]
    if not mats:
        raise ShapeError("nothing to stack")
    heights = {m.nrows for m in mats}
    if len(heights) != 1:
        raise ShapeError(f"hstack height mismatch: {sorted(heights)}")
    h = heights.pop()
    rows = tuple(tuple(x for m in mats for x in m.rows[i]) for i in range(h))
    return RationalMatrix._trusted(rows, sum(m.ncols for m in mats))


def vstack(*mats: RationalMatrix) -> RationalMatrix:
    """Vertical concatenation; zero-row blocks are neutral."""
    mats = [m for m in mats if m is not None]
    if not mats:
        raise ShapeError("nothing to stack")
    widths = {m.ncols for m in mats}
    if len(widths) != 1:
        raise ShapeError(f"vstack width mismatch: {sorted(widths)}")
    return RationalMatrix._trusted(tuple(r for m in mats for r in m.rows), widths.pop())


def matrix_power(M: RationalMatrix, k: int) -> RationalMatrix:
    if M.nrows != M.ncols:
        raise ShapeError("matrix power needs a square matrix")
    if k < 0:
        raise ValueError("negative powers are not supported")
    out = RationalMatrix.identity(M.nrows)
    base = M
    while k:
        if k & 1:
            out = out @ base
        k >>= 1
        if k:
            base = base @ base
    return out


def shift(M: RationalMatrix, lam) -> RationalMatrix:
    """Return ``lam * I - M``."""
    lam = to_rational(lam)
    return RationalMatrix._trusted(
        tuple(tuple((lam if i == j else 0) - x for j, x in enumerate(r)) for i, r in enumerate(M.rows)), M.ncols
    )


# ---------------------------------------------------------------------------
# elimination


def _bareiss(rows: list[list[int]], ncols: int) -> list[int]:
    """Fraction-free forward elimination in place; returns pivot columns.

    After the call the first ``len(pivots)`` rows form an integer echelon
    form of the input.  Every intermediate entry is a minor of the input,
    which is why the integer division below is exact.
    """
    m = len(rows)
    r = 0
    prev = 1
    pivots = []
    for c in range(ncols):
        if r == m:
            break
        p = r
        while p < m and rows[p][c] == 0:
            p += 1
        if p == m:
            continue
        if p != r:
            rows[r], rows[p] = rows[p], rows[r]
        pr = rows[r]
        pv = pr[c]
        for i in range(r + 1, m):
            ri = rows[i]
            a = ri[c]
            for k in range(c + 1, ncols):
                ri[k] = (pv * ri[k] - a * pr[k]) // prev
            ri[c] = 0
        prev = pv
        pivots.append(c)
        r += 1
    return pivots


def _integer_rows(M: RationalMatrix) -> list[list[int]]:
    out = []
    for r in M.rows:
        den = 1
        for x in r:
            if x.denominator != 1:
                den = den * x.denominator // math.gcd(den, x.denominator)
        out.append([int(x * den) for x in r])
    return out


@lru_cache(maxsize=8192)
def rank(M: RationalMatrix) -> int:
    """Exact rank by fraction-free Gaussian elimination.

    Examples
    --------
    >>> rank(RationalMatrix.identity(2))
    2
    """
    if M.nrows == 0 or M.ncols == 0:
        return 0
    if M.nrows > M.ncols:
        M = M.T
    return len(_bareiss(_integer_rows(M), M.ncols))


@lru_cache(maxsize=4096)
def rref(M: RationalMatrix) -> tuple[RationalMatrix, tuple[int, ...]]:
    """Reduced row echelon form (nonzero rows only) and pivot columns."""
    if M.nrows == 0 or M.ncols == 0:
        return RationalMatrix.zeros(0, M.ncols), ()
    rows = _integer_rows(M)
    pivots = _bareiss(rows, M.ncols)
    red = [[Fraction(x) for x in rows[i]] for i in range(len(pivots))]
    for i in range(len(pivots) - 1, -1, -1):
        c = pivots[i]
        pv = red[i][c]
        red[i] = [x / pv for x in red[i]]
        for u in range(i):
            f = red[u][c]
            if f:
                red[u] = [x - f * y for x, y in zip(red[u], red[i])]
    return RationalMatrix._trusted(tuple(tuple(r) for r in red), M.ncols), tuple(pivots)


def determinant(M: RationalMatrix) -> Fraction:
    if M.nrows != M.ncols:
        raise ShapeError("determinant needs a square matrix")
    n = M.nrows
    if n == 0:
        return Fraction(1)
    ints, den = M._integer_form()
    rows = [list(r) for r in ints]
    sign = 1
    prev = 1
    for c in range(n):
        p = c
        while p < n and rows[p][c] == 0:
            p += 1
        if p == n:
            return Fraction(0)
        if p != c:
            rows[c], rows[p] = rows[p], rows[c]
            sign = -sign
        pv = rows[c][c]
        for i in range(c + 1, n):
            a = rows[i][c]
            for k in range(c + 1, n):
                rows[i][k] = (pv * rows[i][k] - a * rows[c][k]) // prev
            rows[i][c] = 0
        prev = pv
    return Fraction(sign * rows[n - 1][n - 1], den**n)


def inverse(M: RationalMatrix) -> RationalMatrix:
    """Exact inverse; raises :class:`NotFullRowRank` for singular input."""
    n = M.nrows
    if n != M.ncols:
        raise ShapeError("inverse needs a square matrix")
    if n == 0:
        return RationalMatrix.zeros(0, 0)
    red, piv = rref(hstack(M, RationalMatrix.identity(n)))
    if piv[:n] != tuple(range(n)):
        raise NotFullRowRank("matrix is singular")
    return red.select_cols(range(n, 2 * n))


def solve(M: RationalMatrix, rhs: RationalMatrix) -> RationalMatrix | None:
    """One exact solution ``X`` of ``M X = rhs``, or ``None`` if inconsistent."""
    if M.nrows != rhs.nrows:
        raise ShapeError("solve: row mismatch")
    n = M.ncols
    red, piv = rref(hstack(M, rhs))
    if any(p >= n for p in piv):
        return None
    rows = [[Fraction(0)] * rhs.ncols for _ in range(n)]
    for i, p in enumerate(piv):
        rows[p] = list(red.rows[i][n:])
    return RationalMatrix(rows, ncols=rhs.ncols)


class IncrementalBasis:
    """Greedy basis builder that keeps the earliest independent vectors.

    Vectors are reduced against an internal echelon form; :meth:`add`
    reports whether the vector was independent of everything kept so far.
    """

    def __init__(self, dim: int):
        self.dim = dim
        self._pivots: dict[int, list[Fraction]] = {}
        self.kept: list[tuple[Fraction, ...]] = []

    def reduce(self, vec) -> list[Fraction]:
        v = [to_rational(x) for x in vec]
        if len(v) != self.dim:
            raise ShapeError(f"vector of length {len(v)} in a {self.dim}-space")
        for c, row in self._pivots.items():
            f = v[c]
            if f:
                v = [x - f * y for x, y in zip(v, row)]
        return v

    def contains(self, vec) -> bool:
        return not any(self.reduce(vec))

    def add(self, vec) -> bool:
        v = self.reduce(vec)
        c = next((i for i, x in enumerate(v) if x), None)
        if c is None:
            return False
        pv = v[c]
        v = [x / pv for x in v]
        for k, row in self._pivots.items():
            f = row[c]
            if f:
                self._pivots[k] = [x - f * y for x, y in zip(row, v)]
        self._pivots[c] = v
        self.kept.append(tuple(to_rational(x) for x in vec))
        return True

    def __len__(self):
        return len(self.kept)


def independent_rows(M: RationalMatrix) -> list[int]:
    """Indices of the earliest linearly independent rows of ``M``."""
    basis = IncrementalBasis(M.ncols)
    return [i for i, r in enumerate(M.rows) if basis.add(r)]


# ---------------------------------------------------------------------------
# subspaces


class Subspace:
    """Column space of a canonical full-column-rank basis.

    The canonical basis is the reduced column echelon form: each basis
    vector has a leading one in a distinct pivot coordinate (pivots chosen
    top-down) and all other basis vectors vanish there.
    """

    __slots__ = ("ambient_dim", "basis")

    def __init__(self, ambient_dim: int, basis: RationalMatrix):
        if basis.nrows != ambient_dim and not (basis.ncols == 0):
            raise ShapeError("basis height differs from ambient dimension")
        self.ambient_dim = ambient_dim
        self.basis = basis if basis.nrows == ambient_dim else RationalMatrix.zeros(ambient_dim, 0)

    @classmethod
    def span(cls, M: RationalMatrix) -> "Subspace":
        """Canonical subspace spanned by the columns of ``M``."""
        red, _ = rref(M.T)
        return cls(M.nrows, red.T if red.nrows else RationalMatrix.zeros(M.nrows, 0))

    @classmethod
    def span_vectors(cls, vectors: Sequence[Sequence], ambient_dim: int) -> "Subspace":
        return cls.span(RationalMatrix.from_columns(vectors, ambient_dim) if vectors else RationalMatrix.zeros(ambient_dim, 0))

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n, RationalMatrix.zeros(n, 0))

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(n, RationalMatrix.identity(n))

    @property
    def dim(self) -> int:
        return self.basis.ncols

    def vectors(self) -> list[tuple[Fraction, ...]]:
        return self.basis.columns()

    def contains(self, other) -> bool:
        if isinstance(other, Subspace):
            return subspace_contains(self, other)
        return subspace_contains(self, Subspace.span(RationalMatrix.column(list(other))))

    def intersect(self, other: "Subspace") -> "Subspace":
        return subspace_intersect(self, other)

    def __add__(self, other: "Subspace") -> "Subspace":
        return subspace_sum(self, other)

    def image(self, M: RationalMatrix) -> "Subspace":
        return column_space(M @ self.basis)

    def orthogonal_complement(self) -> "Subspace":
        return nullspace(self.basis.T) if self.dim else Subspace.full(self.ambient_dim)

    def is_invariant(self, M: RationalMatrix) -> bool:
        return self.contains(self.image(M))

    def __eq__(self, other):
        return isinstance(other, Subspace) and self.ambient_dim == other.ambient_dim and self.basis == other.basis

    def __hash__(self):
        return hash((self.ambient_dim, self.basis))

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim}, basis={self.basis.columns()})"


@lru_cache(maxsize=4096)
def nullspace(M: RationalMatrix) -> Subspace:
    """Canonical basis of ``ker(M)``."""
    n = M.ncols
    red, piv = rref(M)
    free = [j for j in range(n) if j not in piv]
    vecs = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for i, p in enumerate(piv):
            v[p] = -red.rows[i][f]
        vecs.append(v)
    return Subspace.span_vectors(vecs, n)


def column_space(M: RationalMatrix) -> Subspace:
    """Canonical basis of ``Im(M)``."""
    return Subspace.span(M)


def row_space(M: RationalMatrix) -> Subspace:
    """Row space of ``M`` as a subspace of column vectors."""
    return Subspace.span(M.T)


def _check_ambient(a: Subspace, b: Subspace):
    if a.ambient_dim != b.ambient_dim:
        raise ShapeError(f"ambient dimension mismatch: {a.ambient_dim} vs {b.ambient_dim}")


def subspace_contains(outer: Subspace, inner: Subspace) -> bool:
    """True iff ``inner`` is a subspace of ``outer``."""
    _check_ambient(outer, inner)
    if inner.dim == 0:
        return True
    if inner.dim > outer.dim:
        return False
    return rank(hstack(outer.basis, inner.basis)) == outer.dim


def subspace_sum(a: Subspace, b: Subspace) -> Subspace:
    _check_ambient(a, b)
    return Subspace.span(hstack(a.basis, b.basis))


def subspace_intersect(a: Subspace, b: Subspace) -> Subspace:
    """Intersection via the nullspace of the stacked bases ``[a | -b]``."""
    _check_ambient(a, b)
    if a.dim == 0 or b.dim == 0:
        return Subspace.zero(a.ambient_dim)
    ker = nullspace(hstack(a.basis, -b.basis))
    if ker.dim == 0:
        return Subspace.zero(a.ambient_dim)
    coeffs = ker.basis.select_rows(range(a.dim))
    return Subspace.span(a.basis @ coeffs)


# ---------------------------------------------------------------------------
# system matrices


def _square(A: RationalMatrix) -> int:
    if A.nrows != A.ncols:
        raise ShapeError(f"state matrix must be square, got {A.shape}")
    return A.nrows


@lru_cache(maxsize=2048)
def controllability_matrix(A: RationalMatrix, B: RationalMatrix) -> RationalMatrix:
    """``[B, AB, ..., A^(n-1) B]``."""
    n = _square(A)
    if B.nrows != n:
        raise ShapeError(f"B must have {n} rows, got {B.nrows}")
    blocks = [B]
    for _ in range(1, n):
        blocks.append(A @ blocks[-1])
    return hstack(*blocks)


@lru_cache(maxsize=2048)
def observability_matrix(A: RationalMatrix, C: RationalMatrix) -> RationalMatrix:
    """``[C; CA; ...; C A^(n-1)]``."""
    n = _square(A)
    if C.ncols != n:
        raise ShapeError(f"C must have {n} columns, got {C.ncols}")
    blocks = [C]
    for _ in range(1, n):
        blocks.append(blocks[-1] @ A)
    return vstack(*blocks)


def right_inverse(F: RationalMatrix) -> RationalMatrix:
    """``F^T (F F^T)^-1`` for a full row rank ``F``."""
    if rank(F) != F.nrows:
        raise NotFullRowRank(f"matrix of shape {F.shape} has rank {rank(F)}")
    return F.T @ inverse(F @ F.T)


@lru_cache(maxsize=2048)
def krylov_closure(M: RationalMatrix, V: RationalMatrix) -> Subspace:
    """Smallest ``M``-invariant subspace containing ``Im(V)``."""
    n = _square(M)
    if V.nrows != n:
        raise ShapeError(f"V must have {n} rows, got {V.nrows}")
    S = column_space(V)
    while True:
        grown = S + S.image(M)
        if grown.dim == S.dim:
            return S
        S = grown
