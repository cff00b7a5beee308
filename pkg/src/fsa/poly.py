"""Dense univariate polynomials over the rationals and simple number fields.

Polynomials are tuples of :class:`fractions.Fraction` coefficients in
ascending order, ``(c0, c1, ..., cd)``, with no trailing zeros.  The zero
polynomial is the empty tuple.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

Poly = tuple


def trim(coeffs) -> Poly:
    c = [Fraction(x) for x in coeffs]
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


def degree(p: Poly) -> int:
    """Degree of ``p``; the zero polynomial has degree -1."""
    return len(p) - 1


def add(p: Poly, q: Poly) -> Poly:
    n = max(len(p), len(q))
    return trim((p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n))


def sub(p: Poly, q: Poly) -> Poly:
    return add(p, tuple(-c for c in q))


def mul(p: Poly, q: Poly) -> Poly:
    if not p or not q:
        return ()
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return trim(out)


def scale(p: Poly, s) -> Poly:
    return trim(c * s for c in p)


def monic(p: Poly) -> Poly:
    if not p:
        raise ZeroDivisionError("zero polynomial has no leading coefficient")
    return scale(p, 1 / p[-1])


def divmod_poly(p: Poly, q: Poly) -> tuple[Poly, Poly]:
    """Quotient and remainder of ``p`` by a nonzero ``q``."""
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    r = list(p)
    dq = len(q) - 1
    if len(r) - 1 < dq:
        return (), trim(r)
    quo = [Fraction(0)] * (len(r) - dq)
    lead = q[-1]
    for k in range(len(r) - 1 - dq, -1, -1):
        c = r[k + dq] / lead
        quo[k] = c
        if c:
            for i, b in enumerate(q):
                r[k + i] -= c * b
    return trim(quo), trim(r[:dq])


def gcd(p: Poly, q: Poly) -> Poly:
    """Monic greatest common divisor (zero if both inputs are zero)."""
    while q:
        p, q = q, divmod_poly(p, q)[1]
    return monic(p) if p else ()


def derivative(p: Poly) -> Poly:
    return trim(i * c for i, c in enumerate(p) if i)


def evaluate(p: Poly, x):
    """Horner evaluation; ``x`` may be any ring element supporting ``*`` and ``+``."""
    acc = 0 * x
    for c in reversed(p):
        acc = acc * x + c
    return acc


def from_roots(roots) -> Poly:
    """Monic polynomial with the given roots, ``prod (s - r)``."""
    p: Poly = (Fraction(1),)
    for r in roots:
        p = mul(p, (-Fraction(r), Fraction(1)))
    return p


def linear(root) -> Poly:
    return (-Fraction(root), Fraction(1))


def to_integer(p: Poly) -> list[int]:
    """Primitive integer polynomial with the same roots as ``p``."""
    den = 1
    for c in p:
        den = den * c.denominator // math.gcd(den, c.denominator)
    ints = [int(c * den) for c in p]
    g = 0
    for a in ints:
        g = math.gcd(g, a)
    return [a // g for a in ints] if g else ints


def _divisors(n: int) -> list[int]:
    n = abs(n)
    small, large = [], []
    for d in range(1, math.isqrt(n) + 1):
        if n % d == 0:
            small.append(d)
            if d != n // d:
                large.append(n // d)
    return small + large[::-1]


def rational_roots(p: Poly) -> list[Fraction]:
    """Distinct rational roots of a nonzero polynomial, in ascending order."""
    if not p:
        raise ValueError("the zero polynomial has every number as a root")
    a = to_integer(p)
    roots = []
    low = 0
    while low < len(a) and a[low] == 0:
        low += 1
    if low:
        roots.append(Fraction(0))
    a = a[low:]
    if len(a) > 1:
        d = len(a) - 1
        for num in _divisors(a[0]):
            for den in _divisors(a[-1]):
                if math.gcd(num, den) != 1:
                    continue
                for sgn in (1, -1):
                    x = sgn * num
                    # den**d * p(x/den) computed in integers
                    total = 0
                    for i, c in enumerate(a):
                        total += c * x**i * den ** (d - i)
                    if total == 0:
                        roots.append(Fraction(x, den))
    return sorted(set(roots))


def deflate(p: Poly, root) -> tuple[Poly, int]:
    """Divide out ``(s - root)`` as often as possible; return quotient and count."""
    count = 0
    lin = linear(root)
    while p:
        q, r = divmod_poly(p, lin)
        if r:
            break
        p, count = q, count + 1
    return p, count


@lru_cache(maxsize=1024)
def factor_irreducible(p: Poly) -> tuple[tuple[Poly, int], ...]:
    """Irreducible factorization over the rationals of a polynomial with no rational roots.

    Returns monic factors with multiplicities.  Delegates to sympy, which
    implements the full Zassenhaus machinery.
    """
    if degree(p) < 1:
        return ()
    import sympy

    s = sympy.Symbol("s")
    expr = sum(sympy.Rational(c.numerator, c.denominator) * s**i for i, c in enumerate(p))
    _, factors = sympy.factor_list(expr, s, domain="QQ")
    out = []
    for f, mult in factors:
        coeffs = sympy.Poly(f, s).all_coeffs()[::-1]
        q = monic(trim(Fraction(int(c.p), int(c.q)) for c in coeffs))
        out.append((q, int(mult)))
    out.sort(key=lambda t: (len(t[0]), t[0]))
    return tuple(out)


def factor(p: Poly) -> tuple[list[tuple[Fraction, int]], list[tuple[Poly, int]]]:
    """Factor ``p`` into rational roots and irreducible nonlinear factors.

    Returns
    -------
    roots : list of (Fraction, int)
        Rational roots with multiplicities, ascending.
    factors : list of (Poly, int)
        Monic irreducible factors of degree at least two with multiplicities.
    """
    roots = []
    for r in rational_roots(p):
        p, k = deflate(p, r)
        roots.append((r, k))
    return roots, list(factor_irreducible(p)) if degree(p) >= 1 else []


def numeric_roots(p: Poly) -> list[complex]:
    """Floating point roots, sorted by real then imaginary part."""
    import numpy as np

    if degree(p) < 1:
        return []
    vals = np.roots([float(c) for c in reversed(p)])
    return sorted((complex(v) for v in vals), key=lambda z: (round(z.real, 12), round(z.imag, 12)))


def to_str(p: Poly, var: str = "s") -> str:
    """Human readable form, highest power first."""
    if not p:
        return "0"
    terms = []
    for i in range(len(p) - 1, -1, -1):
        c = p[i]
        if c == 0:
            continue
        if i == 0:
            mono = str(abs(c))
        else:
            mono = var if i == 1 else f"{var}^{i}"
            if abs(c) != 1:
                mono = f"{abs(c)}*{mono}"
        sign = "-" if c < 0 else "+"
        terms.append((sign, mono))
    head = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    return " ".join([head] + [f"{sg} {m}" for sg, m in terms[1:]])


class NumberField:
    """The field Q[x]/(q) for a monic irreducible ``q`` of degree at least one."""

    def __init__(self, modulus: Poly):
        modulus = monic(trim(modulus))
        if degree(modulus) < 1:
            raise ValueError("modulus must have positive degree")
        self.modulus = modulus
        self.degree = degree(modulus)

    def __eq__(self, other):
        return isinstance(other, NumberField) and other.modulus == self.modulus

    def __hash__(self):
        return hash(self.modulus)

    def __call__(self, value) -> "FieldElement":
        if isinstance(value, FieldElement):
            return value
        return FieldElement(self, (Fraction(value),))

    @property
    def generator(self) -> "FieldElement":
        return FieldElement(self, (Fraction(0), Fraction(1)))

    def reduce(self, p: Poly) -> Poly:
        return divmod_poly(trim(p), self.modulus)[1]


class FieldElement:
    """Element of a :class:`NumberField`, stored as a reduced polynomial."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: NumberField, coeffs):
        self.field = field
        self.coeffs = field.reduce(coeffs)

    def _lift(self, other):
        if isinstance(other, FieldElement):
            return other.coeffs
        return trim((Fraction(other),))

    def __add__(self, other):
        return FieldElement(self.field, add(self.coeffs, self._lift(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElement(self.field, sub(self.coeffs, self._lift(other)))

    def __rsub__(self, other):
        return FieldElement(self.field, sub(self._lift(other), self.coeffs))

    def __neg__(self):
        return FieldElement(self.field, scale(self.coeffs, -1))

    def __mul__(self, other):
        return FieldElement(self.field, mul(self.coeffs, self._lift(other)))

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        if not self.coeffs:
            raise ZeroDivisionError("inverse of zero in a number field")
        # extended Euclid: track s with s*self = r (mod modulus)
        r0, r1 = self.field.modulus, self.coeffs
        s0, s1 = (), (Fraction(1),)
        while degree(r1) > 0:
            qt, rem = divmod_poly(r0, r1)
            r0, r1 = r1, rem
            s0, s1 = s1, sub(s0, mul(qt, s1))
        return FieldElement(self.field, scale(s1, 1 / r1[0]))

    def __truediv__(self, other):
        if not isinstance(other, FieldElement):
            return FieldElement(self.field, scale(self.coeffs, 1 / Fraction(other)))
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field == other.field and self.coeffs == other.coeffs
        return self.coeffs == self._lift(other)

    def __hash__(self):
        return hash((self.field, self.coeffs))

    def __repr__(self):
        return f"FieldElement({to_str(self.coeffs, 'a')} mod {to_str(self.field.modulus, 'a')})"
