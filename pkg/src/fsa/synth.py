"""Closed-form augmentation of a functional for observer-based functional control.

Given ``(A, B, C, F)``, build rows ``R1`` that complete ``F`` to an
``A^T``-invariant functional ``Fbar = [F; R1]`` (controller side) and rows
``R2`` so that ``[F; R1; R2]`` can be reconstructed by a functional
observer (observer side).  All four rank conditions are re-verified
exactly, with the ``for every lambda`` conditions decided by
:mod:`fsa.pencil`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import poly
from .errors import (
    ConditionsNotMet,
    FbarNotObservableFunctional,
    FNotFullRowRank,
    InconsistencyDetected,
    InvalidDecomposition,
    MultiInputUnsupported,
    NotFO,
    NotFullRowRank,
    NotIFC,
    ShapeError,
)
from .pencil import pencil_profile
from .proptests import Path, SystemQuadruple, functional_rows, test_fc, test_fd, test_fo, test_ifc, test_ifs
from .ratlin import (
    IncrementalBasis,
    RationalMatrix,
    column_space,
    controllability_matrix,
    hstack,
    inverse,
    matrix_power,
    nullspace,
    observability_matrix,
    rank,
    right_inverse,
    vstack,
)
from .spectra import char_poly, eigenvalues, poly_of_matrix


def construct_R1(A: RationalMatrix, F: RationalMatrix) -> RationalMatrix:
    """Rows of ``[FA; FA^2; ...]`` that are new relative to everything kept before.

    ``[F; R1]`` then has the smallest possible number of rows among
    ``A^T``-invariant completions of ``F``.

    Examples
    --------
    >>> A = RationalMatrix([[0, 1], [0, 0]])
    >>> construct_R1(A, RationalMatrix([[1, 0]]))
    RationalMatrix([[0, 1]], ncols=2)
    """
    if rank(F) != F.nrows:
        raise FNotFullRowRank(f"F has {F.nrows} rows but rank {rank(F)}")
    Fbar = functional_rows(A, F)
    return Fbar.select_rows(range(F.nrows, Fbar.nrows))


@dataclass(frozen=True)
class ControllerReceipt:
    invariance: bool
    reduced_pbh: bool
    invariance_ranks: tuple[int, int]
    generic_rank: int
    drop_points: tuple[str, ...]


def controller_receipt(A: RationalMatrix, B: RationalMatrix, Fbar: RationalMatrix) -> ControllerReceipt:
    """Ranks behind :func:`verify_controller_conditions`."""
    d = Fbar.nrows
    if rank(Fbar) != d:
        raise NotFullRowRank(f"Fbar has {d} rows but rank {rank(Fbar)}")
    FA = Fbar @ A
    lhs, rhs = rank(vstack(FA, Fbar)), rank(Fbar)
    # lam [Fbar 0] - [Fbar A  -Fbar B]
    m = B.ncols
    E = hstack(Fbar, RationalMatrix.zeros(d, m))
    G = hstack(FA, -(Fbar @ B))
    prof = pencil_profile(E, G)
    return ControllerReceipt(
        lhs == rhs,
        prof.rank_everywhere_equals(d),
        (lhs, rhs),
        prof.generic_rank,
        tuple(poly.to_str(dr.factor) for dr in prof.drops),
    )


def verify_controller_conditions(A: RationalMatrix, B: RationalMatrix, Fbar: RationalMatrix) -> tuple[bool, bool]:
    """Exact check of the two controller-side rank conditions.

    Returns
    -------
    invariance : bool
        ``rank [Fbar A; Fbar] == rank Fbar``.
    reduced_pbh : bool
        ``rank [lam Fbar - Fbar A, Fbar B] == rank Fbar`` for every complex
        ``lam``.  When ``invariance`` holds this is controllability of the
        reduced pair ``(Fbar A Fbar^-, Fbar B)``.
    """
    r = controller_receipt(A, B, Fbar)
    return r.invariance, r.reduced_pbh


def reduced_pair(A: RationalMatrix, B: RationalMatrix, Fbar: RationalMatrix):
    """``(Fbar A Fbar^-, Fbar B)`` with ``Fbar^-`` the right inverse."""
    Fr = right_inverse(Fbar)
    return Fbar @ A @ Fr, Fbar @ B


@dataclass(frozen=True)
class ObservabilityDecomposition:
    """Coordinates splitting observable and unobservable states.

    ``T^-1 A T = [[A_o, 0], [A_21, A_u]]``, ``C T = [C_o, 0]`` and
    ``Fbar T = [Fbar_o, 0]``.
    """

    T: RationalMatrix
    T_inv: RationalMatrix
    h: int
    A_o: RationalMatrix
    A_21: RationalMatrix
    A_u: RationalMatrix
    C_o: RationalMatrix
    Fbar_o: RationalMatrix


def observability_decomposition(A: RationalMatrix, C: RationalMatrix, Fbar: RationalMatrix) -> ObservabilityDecomposition:
    """Split the state space into ``Im O^T`` and ``ker O`` for ``O = O_(A,C)``.

    Raises
    ------
    FbarNotObservableFunctional
        If ``Fbar`` does not vanish on the unobservable subspace.
    """
    n = A.nrows
    if C.ncols != n or Fbar.ncols != n:
        raise ShapeError("C and Fbar need one column per state")
    O = observability_matrix(A, C)
    obs = column_space(O.T)
    unobs = nullspace(O)
    h = obs.dim
    T = hstack(obs.basis, unobs.basis)
    Ti = inverse(T)
    At = Ti @ A @ T
    idx_o, idx_u = range(h), range(h, n)
    if not At.submatrix(idx_o, idx_u).is_zero():
        raise InvalidDecomposition("unobservable subspace is not A-invariant")
    CT = C @ T
    if not CT.select_cols(idx_u).is_zero():
        raise InvalidDecomposition("C does not vanish on the unobservable subspace")
    FT = Fbar @ T
    if not FT.select_cols(idx_u).is_zero():
        raise FbarNotObservableFunctional("Fbar sees an unobservable direction")
    return ObservabilityDecomposition(
        T,
        Ti,
        h,
        At.submatrix(idx_o, idx_o),
        At.submatrix(idx_u, idx_o),
        At.submatrix(idx_u, idx_u),
        CT.select_cols(idx_o),
        FT.select_cols(idx_o),
    )


def construct_R2(decomp: ObservabilityDecomposition) -> RationalMatrix:
    """``[Fbar_o_perp, 0] T^-1`` with the completion taken from unit rows in index order.

    The result is one valid representative; it is not minimal in general.
    """
    h, Fo = decomp.h, decomp.Fbar_o
    d = Fo.nrows
    if d > h or rank(Fo) != d:
        raise InvalidDecomposition(f"Fbar_o must have full row rank at most {h}, got rank {rank(Fo)} of {d} rows")
    basis = IncrementalBasis(h)
    for row in Fo.rows:
        basis.add(row)
    extra = []
    for i in range(h):
        unit = [Fraction(int(i == j)) for j in range(h)]
        if basis.add(unit):
            extra.append(unit)
    n = decomp.T.nrows
    if not extra:
        return RationalMatrix.zeros(0, n)
    padded = RationalMatrix([row + [0] * (n - h) for row in extra])
    return padded @ decomp.T_inv


@dataclass(frozen=True)
class ObserverReceipt:
    stacked: bool
    pencil: bool
    stacked_ranks: tuple[int, int]
    generic_rank: int
    target_rank: int
    drop_points: tuple[str, ...]


def observer_receipt(A, C, F, R) -> ObserverReceipt:
    n = A.nrows
    R = R if R is not None and R.nrows else RationalMatrix.zeros(0, n)
    H = vstack(F, R)
    CA = C @ A
    base = vstack(CA, C, H)
    lhs, rhs = rank(vstack(H @ A, base)), rank(base)
    p = C.nrows
    E = vstack(H, RationalMatrix.zeros(2 * p, n))
    G = vstack(H @ A, -CA, -C)
    prof = pencil_profile(E, G)
    return ObserverReceipt(
        lhs == rhs,
        prof.rank_everywhere_equals(rhs),
        (lhs, rhs),
        prof.generic_rank,
        rhs,
        tuple(poly.to_str(dr.factor) for dr in prof.drops),
    )


def verify_observer_conditions(A, C, F, R) -> tuple[bool, bool]:
    """Exact check of the two observer-side rank conditions for ``H = [F; R]``.

    Returns
    -------
    stacked : bool
        ``rank [HA; CA; C; H] == rank [CA; C; H]``.
    pencil : bool
        ``rank [lam H - HA; CA; C] == rank [CA; C; H]`` for every complex
        ``lam``.
    """
    r = observer_receipt(A, C, F, R)
    return r.stacked, r.pencil


@dataclass(frozen=True)
class AugmentationResult:
    R1: RationalMatrix
    R2: RationalMatrix
    Fbar: RationalMatrix
    d: int
    controller_conditions_ok: bool
    observer_conditions_ok: bool
    decomposition: ObservabilityDecomposition
    controller: ControllerReceipt
    observer: ObserverReceipt
    asymptotic_ok: bool
    notes: tuple = field(default_factory=tuple)

    @property
    def R(self) -> RationalMatrix:
        return vstack(self.R1, self.R2)


def gsp_synthesize(sys: SystemQuadruple) -> AugmentationResult:
    """Build ``R1`` and ``R2`` and verify all four rank conditions.

    Raises
    ------
    NotIFC, NotFO
        With the failing verdict (and its certificates) attached.
    InconsistencyDetected
        If a condition fails even though both prerequisites hold.
    """
    sys.require("B", "C")
    A, B, C, F = sys.A, sys.B, sys.C, sys.F
    ifc = test_ifc(sys, Path.PBH)
    if not ifc.holds:
        raise NotIFC("closure of the functional is not reachable", ifc)
    fo = test_fo(sys, Path.PBH)
    if not fo.holds:
        raise NotFO("functional is not observable", fo)
    R1 = construct_R1(A, F)
    Fbar = vstack(F, R1)
    decomp = observability_decomposition(A, C, Fbar)
    R2 = construct_R2(decomp)
    ctrl = controller_receipt(A, B, Fbar)
    obs = observer_receipt(A, C, F, vstack(R1, R2))
    if not (ctrl.invariance and ctrl.reduced_pbh and obs.stacked and obs.pencil):
        raise InconsistencyDetected(f"rank conditions failed after prerequisites held: {ctrl}, {obs}")
    asym = test_ifs(sys).holds and test_fd(sys).holds
    return AugmentationResult(
        R1,
        R2,
        Fbar,
        Fbar.nrows,
        True,
        True,
        decomp,
        ctrl,
        obs,
        asym,
        ("R2 is the canonical unit-row completion and need not be row-minimal",),
    )


def design_feedback_gain(A: RationalMatrix, B: RationalMatrix, Fbar: RationalMatrix, desired_poles) -> RationalMatrix:
    """Gain ``Z`` placing the reduced closed loop ``Fbar A Fbar^- - Fbar B Z`` exactly.

    Uses Ackermann's formula on the reduced single-input pair.

    Parameters
    ----------
    desired_poles : sequence of rationals
        One pole per row of ``Fbar``.

    Raises
    ------
    MultiInputUnsupported
        If ``B`` has more than one column.
    ConditionsNotMet
        If the controller-side conditions fail.
    """
    if B.ncols != 1:
        raise MultiInputUnsupported(f"pole placement needs a single input, got {B.ncols}")
    d = Fbar.nrows
    poles = [Fraction(p) for p in desired_poles]
    if len(poles) != d:
        raise ShapeError(f"need {d} poles, got {len(poles)}")
    inv_ok, pbh_ok = verify_controller_conditions(A, B, Fbar)
    if not (inv_ok and pbh_ok):
        raise ConditionsNotMet(f"controller conditions are ({inv_ok}, {pbh_ok})")
    Ar, Br = reduced_pair(A, B, Fbar)
    K = controllability_matrix(Ar, Br)
    last = RationalMatrix([[int(i == d - 1) for i in range(d)]])
    return last @ inverse(K) @ poly_of_matrix(poly.from_roots(poles), Ar)


def closed_loop_char_poly(A, B, Fbar, Z) -> poly.Poly:
    Ar, Br = reduced_pair(A, B, Fbar)
    return char_poly(Ar - Br @ Z)
