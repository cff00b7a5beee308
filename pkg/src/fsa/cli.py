"""Command line entry point: ``fsa analyze | synthesize | fuzz | examples``.

Exit codes
----------
0  every requested property holds, or the command succeeded
1  some property fails, or synthesis prerequisites are not met
2  unreadable input or bad usage
3  the two decision routes disagree, or fuzzing found an inconsistency
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import fileio, fixtures, harness
from .errors import (
    ConditionsNotMet,
    FsaError,
    InconsistencyDetected,
    MissingMatrix,
    MultiInputUnsupported,
    PropertyFailed,
)
from .proptests import CONTROL_SIDE, OBSERVE_SIDE, Path, Property, decide
from .ratlin import to_rational
from .spectra import DEFAULT_TOLERANCES, Tolerances

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_MISMATCH = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _properties(text: str) -> list[Property]:
    try:
        props = [Property(p.strip().lower()) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"unknown property in {text!r}; choose from {', '.join(p.value for p in Property)}"
        ) from None
    if not props:
        raise argparse.ArgumentTypeError("no properties given")
    return list(dict.fromkeys(props))


def _nonneg_float(text: str) -> float:
    x = float(text)
    if not x >= 0:
        raise argparse.ArgumentTypeError(f"tolerance must be non-negative, got {text}")
    return x


def _poles(text: str) -> list[Fraction]:
    try:
        return [to_rational(p.strip()) for p in text.split(",") if p.strip()]
    except (TypeError, ValueError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fsa", description="Decide functional controllability-type properties of linear systems.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--report", choices=("json", "text"), default="json", help="output format")
        p.add_argument("-o", "--output", help="write the report here instead of stdout")

    def tolerances(p):
        p.add_argument("--rank-tol", type=_nonneg_float, help="relative singular value cutoff (irrational spectra)")
        p.add_argument("--stab-tol", type=_nonneg_float, help="treat Re(lambda) >= -tol as unstable (irrational spectra)")

    p = sub.add_parser("analyze", help="decide properties of a system file")
    p.add_argument("system", help="system file (JSON)")
    p.add_argument("--properties", type=_properties, help="comma separated subset of fc,fs,ifc,ifs,fo,fd,toc")
    p.add_argument("--diagnostics", action="store_true", help="per-level rank data for every Jordan chain")
    tolerances(p)
    common(p)

    p = sub.add_parser("synthesize", help="build the augmentation matrices R1 and R2")
    p.add_argument("system", help="system file with A, B, C and F")
    p.add_argument(
        "--poles",
        type=_poles,
        nargs="+",
        help="closed-loop poles for a single-input reduced pair, e.g. --poles=-1,-2 or --poles -1 -2",
    )
    common(p)

    p = sub.add_parser("fuzz", help="cross-check both decision routes on random systems")
    p.add_argument("--count", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-n", type=int, default=6)
    p.add_argument("--max-chain", type=int, default=3)
    p.add_argument("--workers", type=int, default=1, help="worker processes")
    p.add_argument("--shallow", action="store_true", help="skip shift and synthesis checks")
    common(p)

    p = sub.add_parser("examples", help="write the bundled example systems as files")
    p.add_argument("--out", default=".", help="target directory")
    return parser


def _emit(doc: dict, args) -> None:
    text = fileio.dump_report(doc) if args.report == "json" else fileio.render_text(doc)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _warn(msg: str) -> None:
    print(f"fsa: warning: {msg}", file=sys.stderr)


def _fail(msg: str) -> int:
    print(f"fsa: error: {msg}", file=sys.stderr)
    return EXIT_INPUT


def cmd_analyze(args) -> int:
    system = fileio.read_system(args.system)
    props = args.properties
    if props is None:
        props = [p for p in Property if (p in CONTROL_SIDE and system.B is not None) or (p in OBSERVE_SIDE and system.C is not None)]
        if not props:
            raise MissingMatrix("system has neither B nor C, nothing to decide")
    warnings = []
    given = {k: getattr(args, k) for k in ("rank_tol", "stab_tol") if getattr(args, k) is not None}
    if given and fileio.is_exact_input(system):
        warnings.append("spectrum is rational, so the computation is exact and tolerances are ignored")
        given = {}
    tol = Tolerances(
        given.get("rank_tol", DEFAULT_TOLERANCES.rank_tol), given.get("stab_tol", DEFAULT_TOLERANCES.stab_tol)
    )
    for w in warnings:
        _warn(w)
    results = []
    for p in props:
        by_path = {path: decide(system, p, path, tol, args.diagnostics) for path in Path}
        results.append(fileio.property_entry(p, by_path))
    doc = fileio.make_report(
        "analyze",
        system=fileio.system_json(system),
        tolerances={"rank_tol": tol.rank_tol, "stab_tol": tol.stab_tol},
        warnings=warnings,
        results=results,
        all_hold=all(r["holds"] for r in results),
    )
    _emit(doc, args)
    if not all(r["paths_agree"] for r in results):
        return EXIT_MISMATCH
    return EXIT_OK if doc["all_hold"] else EXIT_FAIL


def cmd_synthesize(args) -> int:
    from .synth import closed_loop_char_poly, design_feedback_gain, gsp_synthesize

    system = fileio.read_system(args.system)
    system.require("B", "C")
    try:
        res = gsp_synthesize(system)
    except PropertyFailed as exc:
        v = exc.verdict
        doc = fileio.make_report(
            "synthesize",
            system=fileio.system_json(system),
            error={
                "type": type(exc).__name__,
                "message": str(exc),
                "property": v.property.value,
                "certificates": [fileio.certificate_json(c) for c in v.certificates],
            },
        )
        _emit(doc, args)
        return EXIT_FAIL
    payload = fileio.synthesis_json(res)
    if args.poles is not None:
        args.poles = [x for group in args.poles for x in group]
        Z = design_feedback_gain(system.A, system.B, res.Fbar, args.poles)
        payload["feedback"] = {
            "poles": [str(p) for p in args.poles],
            "Z": fileio.matrix_json(Z),
            "closed_loop_char_poly": fileio.poly_json(closed_loop_char_poly(system.A, system.B, res.Fbar, Z)),
        }
    doc = fileio.make_report("synthesize", system=fileio.system_json(system), synthesis=payload)
    _emit(doc, args)
    return EXIT_OK


def cmd_fuzz(args) -> int:
    if args.count < 0 or args.max_n < 1 or args.max_chain < 1 or args.workers < 1:
        return _fail("--count must be non-negative; --max-n, --max-chain and --workers positive")
    bounds = harness.SizeBounds(max_n=args.max_n, max_chain=args.max_chain)
    report = harness.cross_validate(args.count, bounds, args.seed, deep=not args.shallow, workers=args.workers)
    doc = fileio.make_report("fuzz", **report.to_json())
    _emit(doc, args)
    return EXIT_OK if report.ok else EXIT_MISMATCH


def cmd_examples(args) -> int:
    os.makedirs(args.out, exist_ok=True)
    for name in fixtures.names():
        path = os.path.join(args.out, f"{name}.json")
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(fixtures.raw(name), fh, indent=2)
            fh.write("\n")
        print(path)
    return EXIT_OK


COMMANDS = {"analyze": cmd_analyze, "synthesize": cmd_synthesize, "fuzz": cmd_fuzz, "examples": cmd_examples}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except fileio.InputError as exc:
        return _fail(str(exc))
    except InconsistencyDetected as exc:
        print(f"fsa: internal inconsistency: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except (MissingMatrix, MultiInputUnsupported, ConditionsNotMet) as exc:
        return _fail(str(exc))
    except FsaError as exc:
        return _fail(f"{type(exc).__name__}: {exc}")
    except OSError as exc:
        return _fail(str(exc))


if __name__ == "__main__":
    sys.exit(main())
