"""Exception hierarchy shared by every module."""


class FsaError(Exception):
    """Base class for all package errors."""


class ShapeError(FsaError, ValueError):
    """Operands have incompatible dimensions."""


class NotFullRowRank(FsaError, ValueError):
    """A matrix required to have full row rank does not."""


class FNotFullRowRank(NotFullRowRank):
    """The functional matrix of a system is rank deficient."""


class MissingMatrix(FsaError, ValueError):
    """A property needs a matrix that the system does not carry."""


class NotAnEigenvalue(FsaError, ValueError):
    """The requested scalar is not an eigenvalue of the operator."""


class NumericEigenvalueUnsupportedExact(FsaError):
    """An exact-only routine was handed a numerically approximated eigenvalue."""


class MixedStabilitySplit(NumericEigenvalueUnsupportedExact):
    """An irreducible factor has roots on both sides of the stability boundary.

    The unstable invariant subspace then has no rational basis and callers
    must fall back to floating point.
    """


class InvalidDecomposition(FsaError, ValueError):
    """An observability decomposition does not satisfy its block invariants."""


class FbarNotObservableFunctional(InvalidDecomposition):
    """The stacked functional does not vanish on the unobservable subspace."""


class MultiInputUnsupported(FsaError, ValueError):
    """Pole placement is only implemented for single-input pairs."""


class ConditionsNotMet(FsaError, ValueError):
    """The controller-side rank conditions fail, so no gain exists."""


class InfeasibleSpec(FsaError, ValueError):
    """A random system request cannot be satisfied."""


class InconsistencyDetected(FsaError):
    """Two computations that must agree did not; always an implementation bug."""


class PropertyFailed(FsaError):
    """A prerequisite property fails; carries the failing verdict."""

    def __init__(self, message, verdict=None):
        super().__init__(message)
        self.verdict = verdict


class NotIFC(PropertyFailed):
    """Synthesis needs the intrinsic controllability property."""


class NotFO(PropertyFailed):
    """Synthesis needs functional observability."""
