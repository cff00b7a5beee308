"""Worked example systems used by the ``examples`` command and the test suite."""

from __future__ import annotations

from .proptests import SystemQuadruple
from .ratlin import RationalMatrix

_RAW = {
    "example1": dict(
        A=[[4, 0, -2, 7], [1, 2, 0, 2], [-1, 0, 4, -5], [-1, 1, 1, -1]],
        B=[[2], [1], [-1], [-1]],
        F=[[1, 2, 1, 2]],
        notes="one Jordan chain of length 3 at lambda=2; the input sees its second vector",
    ),
    "example2": dict(
        A=[[0, 1], [0, 0]],
        B=[[1], [0]],
        F=[[1, 0]],
        notes="double integrator driven at the wrong end; functional reachable, closure not",
    ),
    "example3": dict(
        A=[[0, 1, 0, 0], [0, 0, 0, 0], [0, 0, 1, 1], [0, 0, 0, 1]],
        B=[[0], [1], [0], [0]],
        F=[[1, 0, 0, 0]],
        notes="controllable double integrator beside an uncontrolled unstable block",
    ),
    "example4": dict(
        A=[[5, -50, 59, 64], [2, -29, 32, 36], [-4, 54, -66, -72], [5, -67, 79, 87]],
        B=[[-4], [-2], [4], [-5]],
        F=[[0, 1, 1, 0]],
        notes="spectrum {1, 1, -2, -3}; the unstable chain is hidden from the input",
    ),
    "example5": dict(
        A=[[5, 0, 1, 4], [1, 2, 0, 2], [-2, 1, 2, -3], [-1, 0, 0, 0]],
        C=[[1, 2, 2, 0]],
        F=[[1, 2, 1, 2]],
        notes="observability side; chain of length 3 at lambda=2",
    ),
    "example6": dict(
        A=[[4, -4, 2, -5], [1, 1, 1, -1], [-1, 3, 1, 4], [-1, 3, -1, 5]],
        B=[[1], [0], [0], [0]],
        F=[[1, 3, 2, 1]],
        notes="uncontrollable eigenvalue 4 seen by F, yet the target output is reachable",
    ),
}


def names() -> list[str]:
    return list(_RAW)


def raw(name: str) -> dict:
    """JSON-ready description of an example (integer entries)."""
    d = _RAW[name]
    return {"name": name, **{k: v for k, v in d.items()}}


def system(name: str) -> SystemQuadruple:
    d = _RAW[name]
    mat = lambda key: RationalMatrix(d[key]) if key in d else None  # noqa: E731
    return SystemQuadruple(mat("A"), mat("F"), mat("B"), mat("C"), name)
