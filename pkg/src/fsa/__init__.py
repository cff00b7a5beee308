"""Exact decision procedures for functional system properties.

The package decides whether a linear functional ``z = F x`` of the state of
``x' = A x + B u, y = C x`` can be steered (functional controllability and
stabilizability, their intrinsic variants, target output controllability)
or reconstructed (functional observability and detectability).  Every
property is decided twice, once by subspace rank identities and once by
Jordan chain rank tests, and failures come with replayable certificates.
"""

from .errors import FsaError
from .proptests import (
    Certificate,
    Path,
    Property,
    PropertyVerdict,
    SystemQuadruple,
    decide,
    implication_lattice,
    replay_certificate,
    test_fc,
    test_fd,
    test_fo,
    test_fs,
    test_ifc,
    test_ifs,
    test_toc,
)
from .ratlin import RationalMatrix, Subspace
from .spectra import Tolerances, eigenvalues, jordan_chains
from .synth import gsp_synthesize

__version__ = "0.1.0"

__all__ = [
    "Certificate",
    "FsaError",
    "Path",
    "Property",
    "PropertyVerdict",
    "RationalMatrix",
    "Subspace",
    "SystemQuadruple",
    "Tolerances",
    "decide",
    "eigenvalues",
    "gsp_synthesize",
    "implication_lattice",
    "jordan_chains",
    "replay_certificate",
    "test_fc",
    "test_fd",
    "test_fo",
    "test_fs",
    "test_ifc",
    "test_ifs",
    "test_toc",
]
