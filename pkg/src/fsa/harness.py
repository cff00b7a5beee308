"""Random systems with prescribed Jordan structure and cross-validation runs."""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from . import poly
from .errors import InfeasibleSpec
from .proptests import (
    Path,
    Property,
    SystemQuadruple,
    ifc_by_shifts,
    implication_lattice,
    replay_certificate,
    test_fo,
)
from .ratlin import RationalMatrix, rank, vstack
from .spectra import char_poly


@dataclass(frozen=True)
class JordanSpec:
    """Eigenvalues with the lengths of their Jordan chains, plus a seed.

    Examples
    --------
    >>> JordanSpec(((2, (3,)), (3, (1,))), seed=7).n
    4
    """

    blocks: tuple
    seed: int = 0

    def __post_init__(self):
        norm = tuple((Fraction(ev), tuple(int(L) for L in lengths)) for ev, lengths in self.blocks)
        if any(L < 1 for _, lengths in norm for L in lengths):
            raise InfeasibleSpec("chain lengths must be positive")
        object.__setattr__(self, "blocks", norm)

    @property
    def n(self) -> int:
        return sum(sum(lengths) for _, lengths in self.blocks)

    def char_poly(self) -> poly.Poly:
        roots = [ev for ev, lengths in self.blocks for _ in range(sum(lengths))]
        return poly.from_roots(roots)

    def to_json(self) -> dict:
        return {"blocks": [[str(ev), list(lengths)] for ev, lengths in self.blocks], "seed": self.seed}


@dataclass(frozen=True)
class SizeBounds:
    max_n: int = 6
    max_chain: int = 3
    max_inputs: int = 2
    max_outputs: int = 2
    max_functionals: int = 2
    eigenvalue_pool: tuple = (-2, -1, 0, 1, 2)


def _jordan_matrix(spec: JordanSpec):
    n = spec.n
    J = [[0] * n for _ in range(n)]
    segments = []  # (start, length) per chain
    pos = 0
    for ev, lengths in spec.blocks:
        for L in lengths:
            for i in range(L):
                J[pos + i][pos + i] = ev
                if i + 1 < L:
                    J[pos + i][pos + i + 1] = 1
            segments.append((pos, L))
            pos += L
    return J, segments


def _unimodular(n: int, rng: random.Random):
    """Integer matrix with determinant one and its exact inverse."""
    S = [[int(i == j) for j in range(n)] for i in range(n)]
    Si = [row[:] for row in S]
    if n < 2:
        return S, Si
    for _ in range(2 * n):
        i, j = rng.sample(range(n), 2)
        c = rng.choice([-3, -2, -1, 1, 2, 3])
        # S <- E S with E = I + c e_i e_j^T; inverse picks up E^-1 on the right
        S[i] = [a + c * b for a, b in zip(S[i], S[j])]
        for row in Si:
            row[j] -= c * row[i]
        if max(abs(x) for row in S for x in row) > 60:
            break
    return S, Si


def _matmul(X, Y):
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*Y)] for row in X]


def _hidden_coordinates(rng: random.Random, segments, by_rows: bool) -> list[int]:
    """State coordinates to zero out, chosen chain by chain."""
    out = []
    for start, L in segments:
        mode = rng.random()
        if mode < 0.2:
            out.extend(range(start, start + L))  # whole chain invisible
        elif mode < 0.35:
            # partially visible: hide the end that drives (rows) or is seen (cols)
            out.append(start + L - 1 if by_rows else start)
        elif mode < 0.5:
            # only the eigenvector coordinate survives
            out.extend(range(start + 1, start + L))
    return out


def _masked(rng: random.Random, rows: int, cols: int, hidden, by_rows: bool):
    """Random small integer matrix with the ``hidden`` state coordinates zeroed.

    ``by_rows`` means state coordinates index rows (input side), otherwise
    columns.
    """
    M = [[rng.randint(-2, 2) for _ in range(cols)] for _ in range(rows)]
    for k in hidden:
        if by_rows:
            M[k] = [0] * cols
        else:
            for row in M:
                row[k] = 0
    return M


def generate_system(spec: JordanSpec, m: int, p: int, r: int) -> SystemQuadruple:
    """Random ``(A, B, C, F)`` with ``A`` similar to the Jordan matrix of ``spec``.

    ``B``, ``C`` and ``F`` are drawn in Jordan coordinates with some chains
    masked out, then mapped back, so uncontrollable and unobservable modes
    occur often.  ``F`` is redrawn until it has full row rank.
    """
    n = spec.n
    if not (n >= r >= 1):
        raise InfeasibleSpec(f"need n >= r >= 1, got n={n}, r={r}")
    rng = random.Random(spec.seed)
    J, segments = _jordan_matrix(spec)
    S, Si = _unimodular(n, rng)
    A = _matmul(_matmul(S, J), Si)
    driven_off = _hidden_coordinates(rng, segments, True)
    B = _matmul(S, _masked(rng, n, m, driven_off, True))
    C = _matmul(_masked(rng, p, n, _hidden_coordinates(rng, segments, False), False), Si)
    for _ in range(200):
        if rng.random() < 0.5:
            # F^T = S v with v supported where B drives, so F^T starts out in
            # the reachable space; fc without ifc becomes common
            St = [list(col) for col in zip(*S)]
            F = RationalMatrix(_matmul(_masked(rng, r, n, driven_off, False), St))
        else:
            F = RationalMatrix(_matmul(_masked(rng, r, n, _hidden_coordinates(rng, segments, False), False), Si))
        if rank(F) == r:
            break
    else:
        raise InfeasibleSpec("could not draw a full row rank functional")
    return SystemQuadruple(
        RationalMatrix(A), F, RationalMatrix(B, ncols=m), RationalMatrix(C, ncols=n), f"seed-{spec.seed}"
    )


def random_spec(rng: random.Random, bounds: SizeBounds) -> JordanSpec:
    n_target = rng.randint(1, bounds.max_n)
    pool = list(bounds.eigenvalue_pool)
    rng.shuffle(pool)
    blocks, n = [], 0
    for ev in pool:
        if n >= n_target:
            break
        lengths = []
        for _ in range(rng.randint(1, 2)):
            room = n_target - n
            if room <= 0:
                break
            L = rng.randint(1, min(bounds.max_chain, room))
            lengths.append(L)
            n += L
        blocks.append((ev, tuple(lengths)))
    return JordanSpec(tuple(blocks), rng.getrandbits(64))


def system_for_index(seed: int, index: int, bounds: SizeBounds = SizeBounds()) -> tuple[JordanSpec, SystemQuadruple]:
    """The ``index``-th system of a seeded run; independent of run length."""
    rng = random.Random(f"fsa:{seed}:{index}")
    spec = random_spec(rng, bounds)
    m = rng.randint(1, bounds.max_inputs)
    p = rng.randint(1, bounds.max_outputs)
    r = rng.randint(1, min(bounds.max_functionals, spec.n))
    return spec, generate_system(spec, m, p, r)


@dataclass
class SystemRecord:
    index: int
    spec: JordanSpec
    n: int
    verdicts: dict
    mismatches: list
    violations: list
    certificate_failures: list
    extra_failures: list

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "spec": self.spec.to_json(),
            "n": self.n,
            "verdicts": self.verdicts,
            "mismatches": self.mismatches,
            "violations": self.violations,
            "certificate_failures": self.certificate_failures,
            "extra_failures": self.extra_failures,
        }


@dataclass
class FuzzReport:
    count: int
    seed: int
    bounds: SizeBounds
    records: list = field(default_factory=list)

    @property
    def mismatches(self) -> list:
        return [f"#{r.index}: {m}" for r in self.records for m in r.mismatches]

    @property
    def violations(self) -> list:
        return [f"#{r.index}: {v}" for r in self.records for v in r.violations]

    @property
    def failures(self) -> list:
        return [
            f"#{r.index}: {f}" for r in self.records for f in r.certificate_failures + r.extra_failures
        ]

    @property
    def ok(self) -> bool:
        return not (self.mismatches or self.violations or self.failures)

    def tally(self) -> dict:
        out = {}
        for p in Property:
            out[p.value] = sum(1 for r in self.records if r.verdicts[p.value])
        return out

    def to_json(self) -> dict:
        return {
            "count": self.count,
            "seed": self.seed,
            "bounds": {
                "max_n": self.bounds.max_n,
                "max_chain": self.bounds.max_chain,
                "max_inputs": self.bounds.max_inputs,
                "max_outputs": self.bounds.max_outputs,
                "max_functionals": self.bounds.max_functionals,
                "eigenvalue_pool": [str(x) for x in self.bounds.eigenvalue_pool],
            },
            "holds_tally": self.tally(),
            "mismatches": self.mismatches,
            "violations": self.violations,
            "failures": self.failures,
            "systems": [r.to_json() for r in self.records],
        }


def check_system(index: int, spec: JordanSpec, sys: SystemQuadruple, deep: bool = True) -> SystemRecord:
    """All verdicts on both routes plus certificate, spectrum and synthesis checks."""
    lat = implication_lattice(sys, strict=False)
    cert_fail = []
    for p, by_path in lat.verdicts.items():
        for path, v in by_path.items():
            if not v.holds and not v.certificates:
                cert_fail.append(f"{p.value}/{path.value}: failure without certificate")
            for c in v.certificates:
                if not replay_certificate(sys, c):
                    cert_fail.append(f"{p.value}/{path.value}: certificate does not replay")
    extra = []
    if char_poly(sys.A) != spec.char_poly():
        extra.append("spectrum differs from the requested one")
    if deep:
        ifc = lat.holds(Property.IFC)
        if ifc != ifc_by_shifts(sys):
            extra.append("ifc differs from fc of every shifted functional")
        if ifc and lat.holds(Property.FO):
            extra.extend(_synthesis_failures(sys))
    return SystemRecord(
        index,
        spec,
        sys.n,
        {p.value: lat.holds(p) for p in Property},
        lat.mismatches,
        lat.violations,
        cert_fail,
        extra,
    )


def _synthesis_failures(sys: SystemQuadruple) -> list:
    from .synth import gsp_synthesize, verify_controller_conditions, verify_observer_conditions

    try:
        res = gsp_synthesize(sys)
    except Exception as exc:  # reported, never raised
        return [f"synthesis raised {type(exc).__name__}: {exc}"]
    out = []
    if verify_controller_conditions(sys.A, sys.B, res.Fbar) != (True, True):
        out.append("controller conditions do not re-verify")
    if verify_observer_conditions(sys.A, sys.C, sys.F, vstack(res.R1, res.R2)) != (True, True):
        out.append("observer conditions do not re-verify")
    if not test_fo(sys.with_functional(res.Fbar), Path.ORACLE).holds:
        out.append("completed functional lost observability")
    return out


def _check_index(args) -> SystemRecord:
    seed, i, bounds, deep = args
    spec, sys = system_for_index(seed, i, bounds)
    return check_system(i, spec, sys, deep)


def cross_validate(
    count: int, size_bounds: SizeBounds = SizeBounds(), seed: int = 0, deep: bool = True, workers: int = 1
) -> FuzzReport:
    """Generate ``count`` systems and cross-check everything on each.

    The report is a pure function of ``(count, size_bounds, seed)``; with
    ``workers > 1`` systems are checked in separate processes and the
    records are put back in index order.
    """
    report = FuzzReport(count, seed, size_bounds)
    jobs = [(seed, i, size_bounds, deep) for i in range(count)]
    if workers > 1 and count > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_check_index, jobs, chunksize=max(1, count // (4 * workers))))
    else:
        records = [_check_index(job) for job in jobs]
    report.records = sorted(records, key=lambda r: r.index)
    return report
