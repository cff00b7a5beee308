"""System files in, report documents out.

Rationals travel as ``"p/q"`` strings so nothing is lost to floating point.
Reports are written with sorted keys and fixed indentation, so parsing a
report and writing it again reproduces the same bytes.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction

from . import poly
from .errors import FNotFullRowRank, FsaError, ShapeError
from .proptests import Certificate, Path, Property, PropertyVerdict, SystemQuadruple, scalar_json
from .ratlin import RationalMatrix, to_rational
from .spectra import Eigenvalue, Exactness

REPORT_FORMAT = "fsa-report/1"
SYSTEM_KEYS = ("A", "B", "C", "F")
_OPTIONAL_KEYS = ("name", "notes")


class InputError(FsaError, ValueError):
    """A system file that cannot be read, with its line number when known."""

    def __init__(self, message: str, line: int | None = None, source: str = "<input>"):
        self.line = line
        self.source = source
        where = f"{source}:{line}" if line is not None else source
        super().__init__(f"{where}: {message}")


# ---------------------------------------------------------------------------
# system files


def _locate(text: str, key: str, row: int | None = None) -> int | None:
    """Line of ``"key":`` in ``text``, or of its ``row``-th inner list."""
    m = re.search(r'"%s"\s*:' % re.escape(key), text)
    if m is None:
        return None
    pos = m.end()
    if row is not None:
        depth, seen = 0, -1
        for i in range(pos, len(text)):
            ch = text[i]
            if ch == "[":
                depth += 1
                if depth == 2:
                    seen += 1
                    if seen == row:
                        pos = i
                        break
            elif ch == "]":
                depth -= 1
                if depth == 0:
                    break
    return text.count("\n", 0, pos) + 1


def _entry(x, key: str, loc) -> Fraction:
    if isinstance(x, bool) or isinstance(x, float):
        raise InputError(
            f"{key}: {x!r} is not allowed; write integers, decimal strings or 'p/q' strings", *loc
        )
    try:
        return to_rational(x)
    except (TypeError, ValueError, ZeroDivisionError):
        raise InputError(f"{key}: cannot read {x!r} as a rational number", *loc) from None


def _matrix(value, key: str, text: str, source: str, ncols: int | None) -> RationalMatrix:
    if not isinstance(value, list):
        raise InputError(f"{key} must be a list of rows", _locate(text, key), source)
    if not value:
        if ncols is None:
            raise InputError(f"{key} must not be empty", _locate(text, key), source)
        return RationalMatrix.zeros(0, ncols)
    rows = []
    for i, row in enumerate(value):
        loc = (_locate(text, key, i), source)
        if not isinstance(row, list):
            raise InputError(f"{key} row {i} must be a list", *loc)
        if rows and len(row) != len(rows[0]):
            raise InputError(f"{key} row {i} has {len(row)} entries, row 0 has {len(rows[0])}", *loc)
        rows.append([_entry(x, f"{key}[{i}]", loc) for x in row])
    return RationalMatrix(rows, ncols=len(rows[0]))


def parse_system(text: str, source: str = "<input>") -> SystemQuadruple:
    """Read a system file.

    Raises
    ------
    InputError
        On malformed JSON, unreadable entries or inconsistent dimensions.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON: {exc.msg}", exc.lineno, source) from None
    if not isinstance(doc, dict):
        raise InputError("top level must be an object", 1, source)
    unknown = sorted(set(doc) - set(SYSTEM_KEYS) - set(_OPTIONAL_KEYS))
    if unknown:
        raise InputError(f"unknown keys: {', '.join(unknown)}", _locate(text, unknown[0]), source)
    for key in ("A", "F"):
        if key not in doc:
            raise InputError(f"missing required matrix {key}", None, source)
    A = _matrix(doc["A"], "A", text, source, None)
    n = A.nrows
    if A.ncols != n:
        raise InputError(f"A must be square, got {A.nrows}x{A.ncols}", _locate(text, "A"), source)
    mats = {"A": A}
    for key in ("B", "C", "F"):
        if key in doc and doc[key] is not None:
            mats[key] = _matrix(doc[key], key, text, source, n if key in ("C", "F") else None)
    for key, (axis, want) in {"F": ("columns", "ncols"), "C": ("columns", "ncols"), "B": ("rows", "nrows")}.items():
        if key in mats and getattr(mats[key], want) != n:
            got = getattr(mats[key], want)
            raise InputError(f"{key} has {got} {axis}, expected {n}", _locate(text, key), source)
    name = doc.get("name", "")
    if not isinstance(name, str):
        raise InputError("name must be a string", _locate(text, "name"), source)
    try:
        return SystemQuadruple(mats["A"], mats["F"], mats.get("B"), mats.get("C"), name)
    except FNotFullRowRank as exc:
        raise InputError(str(exc), _locate(text, "F"), source) from None
    except ShapeError as exc:
        raise InputError(str(exc), None, source) from None


def read_system(path) -> SystemQuadruple:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(exc.strerror or str(exc), None, str(path)) from None
    return parse_system(text, str(path))


def matrix_json(M: RationalMatrix | None):
    return None if M is None else [[str(x) for x in row] for row in M.rows]


def system_json(sys: SystemQuadruple, notes: str = "") -> dict:
    out = {k: matrix_json(getattr(sys, k)) for k in SYSTEM_KEYS if getattr(sys, k) is not None}
    if sys.name:
        out["name"] = sys.name
    if notes:
        out["notes"] = notes
    return out


def is_exact_input(sys: SystemQuadruple) -> bool:
    """Whether every eigenvalue of ``A`` is rational."""
    from .spectra import eigenvalues

    return all(ev.exact for ev in eigenvalues(sys.A))


# ---------------------------------------------------------------------------
# verdicts and certificates


def _vec_json(v) -> list:
    return [scalar_json(x) for x in v]


def _scalar_from_json(x):
    if isinstance(x, dict):
        return complex(x["re"], x["im"])
    return Fraction(x)


def eigenvalue_json(ev: Eigenvalue | None):
    if ev is None:
        return None
    return {
        "value": scalar_json(ev.value),
        "alg_mult": ev.alg_mult,
        "exact": ev.exact,
        "factor": [str(c) for c in ev.factor],
    }


def eigenvalue_from_json(d) -> Eigenvalue | None:
    if d is None:
        return None
    return Eigenvalue(
        _scalar_from_json(d["value"]),
        d["alg_mult"],
        Exactness.EXACT if d["exact"] else Exactness.NUMERIC,
        tuple(Fraction(c) for c in d["factor"]),
    )


def certificate_json(c: Certificate) -> dict:
    return {
        "property": Property(c.property).value,
        "kind": c.kind,
        "relation": c.relation,
        "witness": _vec_json(c.witness),
        "detected": _vec_json(c.detected),
        "operator": c.operator,
        "detector": c.detector,
        "shift": c.shift,
        "eigenvalue": eigenvalue_json(c.eigenvalue),
        "chain_id": c.chain_id,
        "k": c.k,
        "chain": [_vec_json(v) for v in c.chain],
    }


def certificate_from_json(d: dict) -> Certificate:
    """Rebuild a certificate so it can be replayed against a system."""
    vec = lambda v: tuple(_scalar_from_json(x) for x in v)  # noqa: E731
    return Certificate(
        Property(d["property"]),
        d["kind"],
        d["relation"],
        vec(d["witness"]),
        vec(d["detected"]),
        d["operator"],
        d["detector"],
        d["shift"],
        eigenvalue_from_json(d["eigenvalue"]),
        d["chain_id"],
        d["k"],
        tuple(vec(v) for v in d["chain"]),
    )


def verdict_json(v: PropertyVerdict) -> dict:
    return {
        "holds": v.holds,
        "certificates": [certificate_json(c) for c in v.certificates],
        "rank_checks": [
            {"description": r.description, "lhs": r.lhs, "rhs": r.rhs, "eigenvalue": r.eigenvalue, "ok": r.ok}
            for r in v.ranks_checked
        ],
        "notes": list(v.notes),
        "diagnostics": v.diagnostics,
    }


def property_entry(prop: Property, by_path: dict) -> dict:
    oracle, chain = by_path[Path.ORACLE], by_path[Path.PBH]
    return {
        "property": prop.value,
        "holds": oracle.holds and chain.holds,
        "paths_agree": oracle.holds == chain.holds,
        "paths": {path.value: verdict_json(v) for path, v in by_path.items()},
    }


# ---------------------------------------------------------------------------
# synthesis payload


def synthesis_json(res) -> dict:
    dec = res.decomposition
    ctrl, obs = res.controller, res.observer
    return {
        "R1": matrix_json(res.R1),
        "R2": matrix_json(res.R2),
        "Fbar": matrix_json(res.Fbar),
        "d": res.d,
        "controller_conditions_ok": res.controller_conditions_ok,
        "observer_conditions_ok": res.observer_conditions_ok,
        "asymptotic_ok": res.asymptotic_ok,
        "decomposition": {
            "T": matrix_json(dec.T),
            "T_inv": matrix_json(dec.T_inv),
            "observable_dim": dec.h,
            "A_o": matrix_json(dec.A_o),
            "A_21": matrix_json(dec.A_21),
            "A_u": matrix_json(dec.A_u),
            "C_o": matrix_json(dec.C_o),
            "Fbar_o": matrix_json(dec.Fbar_o),
        },
        "receipts": {
            "controller_invariance": {
                "holds": ctrl.invariance,
                "lhs": ctrl.invariance_ranks[0],
                "rhs": ctrl.invariance_ranks[1],
            },
            "controller_pencil": {
                "holds": ctrl.reduced_pbh,
                "generic_rank": ctrl.generic_rank,
                "target_rank": res.d,
                "drop_points": list(ctrl.drop_points),
            },
            "observer_stacked": {"holds": obs.stacked, "lhs": obs.stacked_ranks[0], "rhs": obs.stacked_ranks[1]},
            "observer_pencil": {
                "holds": obs.pencil,
                "generic_rank": obs.generic_rank,
                "target_rank": obs.target_rank,
                "drop_points": list(obs.drop_points),
            },
        },
        "notes": list(res.notes),
    }


# ---------------------------------------------------------------------------
# documents


def make_report(command: str, **body) -> dict:
    return {"format": REPORT_FORMAT, "command": command, **body}


def dump_report(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def load_report(text: str) -> dict:
    doc = json.loads(text)
    if doc.get("format") != REPORT_FORMAT:
        raise InputError(f"not a report document (format {doc.get('format')!r})")
    return doc


def _fmt_scalar(x) -> str:
    if isinstance(x, dict):
        return f"{x['re']:.6g}{x['im']:+.6g}j"
    return str(x)


def _fmt_vec(v) -> str:
    return "(" + ", ".join(_fmt_scalar(x) for x in v) + ")"


def render_text(doc: dict) -> str:
    """Short human-readable rendering of a report document."""
    lines = []
    cmd = doc["command"]
    name = doc.get("system", {}).get("name")
    lines.append(f"{cmd}: {name}" if name else cmd)
    for w in doc.get("warnings", []):
        lines.append(f"warning: {w}")
    if cmd == "analyze":
        for entry in doc["results"]:
            flag = "holds" if entry["holds"] else "fails"
            if not entry["paths_agree"]:
                flag = "PATHS DISAGREE"
            lines.append(f"  {entry['property']:<4} {flag}")
            for path, v in sorted(entry["paths"].items()):
                for r in v["rank_checks"]:
                    at = f" at lambda={_fmt_scalar(r['eigenvalue'])}" if r["eigenvalue"] is not None else ""
                    lines.append(f"       [{path}] {r['description']}{at}: {r['lhs']} vs {r['rhs']}")
                for c in v["certificates"]:
                    lines.append(f"       [{path}] certificate: {c['relation']}")
                    lines.append(f"         witness {_fmt_vec(c['witness'])}, value {_fmt_vec(c['detected'])}")
    elif cmd == "synthesize":
        if "synthesis" in doc:
            s = doc["synthesis"]
            lines.append(f"  d = {s['d']}")
            for key in ("R1", "R2", "Fbar"):
                rows = s[key] or []
                lines.append(f"  {key}: " + ("; ".join(" ".join(r) for r in rows) if rows else "(empty)"))
            for key, rec in sorted(s["receipts"].items()):
                lines.append(f"  {key}: {'ok' if rec['holds'] else 'FAILED'}")
            if "feedback" in s:
                fb = s["feedback"]
                lines.append("  Z: " + "; ".join(" ".join(r) for r in fb["Z"]))
                lines.append("  closed loop: " + poly.to_str(tuple(Fraction(c) for c in fb["closed_loop_char_poly"])))
        else:
            lines.append(f"  {doc['error']['type']}: {doc['error']['message']}")
            for c in doc["error"].get("certificates", []):
                lines.append(f"    certificate: {c['relation']}")
    elif cmd == "fuzz":
        lines.append(f"  systems: {doc['count']}, seed {doc['seed']}")
        lines.append("  holds: " + ", ".join(f"{k}={v}" for k, v in sorted(doc["holds_tally"].items())))
        for key in ("mismatches", "violations", "failures"):
            lines.append(f"  {key}: {len(doc[key])}")
            lines.extend(f"    {m}" for m in doc[key])
    return "\n".join(lines) + "\n"


def poly_json(p: poly.Poly) -> list:
    return [str(c) for c in p]
