import json
from fractions import Fraction
from pathlib import Path

import jsonschema
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fsa import fileio, fixtures
from fsa import proptests as pt
from fsa.fileio import InputError, parse_system
from fsa.proptests import Property

SCHEMAS = Path(__file__).resolve().parent.parent / "docs" / "schemas"


def schema(name):
    return jsonschema.Draft202012Validator(json.loads((SCHEMAS / name).read_text()))


def test_schemas_are_valid_documents():
    for name in ("system-file.schema.json", "report.schema.json"):
        jsonschema.Draft202012Validator.check_schema(json.loads((SCHEMAS / name).read_text()))


def test_example_files_match_system_schema():
    v = schema("system-file.schema.json")
    for name in fixtures.names():
        v.validate(fixtures.raw(name))


def test_parse_accepts_integers_decimals_and_fractions():
    s = parse_system('{"A": [[1, "0.5"], ["-3/4", 0]], "F": [["1", "2/3"]], "name": "mix"}')
    assert s.A.rows[0][1] == Fraction(1, 2) and s.A.rows[1][0] == Fraction(-3, 4)
    assert s.F.rows[0][1] == Fraction(2, 3)
    assert s.B is None and s.C is None and s.name == "mix"


def test_malformed_json_reports_line():
    with pytest.raises(InputError) as info:
        parse_system('{\n  "A": [[1]],\n  "F": [[1]]\n  oops\n}', "sys.json")
    assert info.value.line == 4
    assert str(info.value).startswith("sys.json:4:")


def test_float_entry_rejected_with_its_row_line():
    text = '{\n "A": [\n  [1, 0],\n  [0, 0.5]\n ],\n "F": [[1, 0]]\n}'
    with pytest.raises(InputError) as info:
        parse_system(text)
    assert info.value.line == 4
    assert "0.5" in str(info.value)


@pytest.mark.parametrize(
    "doc,fragment",
    [
        ({"A": [[1, 2]], "F": [[1, 0]]}, "square"),
        ({"A": [[1, 0], [0, 1]], "F": [[1, 0, 0]]}, "columns"),
        ({"A": [[1, 0], [0, 1]], "F": [[1, 0]], "B": [[1]]}, "rows"),
        ({"A": [[1, 0], [0, 1]], "F": [[1, 0], [0]]}, "entries"),
        ({"A": [[1, 0], [0, 1]], "F": [[1, 1], [2, 2]]}, "rank"),
        ({"A": [[1, 0], [0, 1]]}, "missing"),
        ({"A": [[1, 0], [0, 1]], "F": [[1, 0]], "G": [[1]]}, "unknown"),
        ({"A": [[1, 0], [0, 1]], "F": [["x", 0]]}, "rational"),
        ({"A": [[1, 0], [0, 1]], "F": [[True, 0]]}, "not allowed"),
        ([1, 2], "object"),
    ],
)
def test_invalid_systems_are_rejected(doc, fragment):
    with pytest.raises(InputError) as info:
        parse_system(json.dumps(doc, indent=1))
    assert fragment in str(info.value)


def test_empty_functional_keeps_state_dimension():
    s = parse_system('{"A": [[1, 0], [0, 1]], "F": [], "B": [[1], [0]]}')
    assert s.F.shape == (0, 2)


def test_missing_file_is_an_input_error(tmp_path):
    with pytest.raises(InputError):
        fileio.read_system(tmp_path / "nope.json")


def test_system_json_round_trip():
    for name in fixtures.names():
        s = fixtures.system(name)
        again = parse_system(json.dumps(fileio.system_json(s)))
        assert (again.A, again.B, again.C, again.F, again.name) == (s.A, s.B, s.C, s.F, s.name)


def _analyze_doc(s):
    props = [p for p in Property if (s.C if p in pt.OBSERVE_SIDE else s.B) is not None]
    results = [fileio.property_entry(p, {path: pt.decide(s, p, path) for path in pt.Path}) for p in props]
    return fileio.make_report(
        "analyze",
        system=fileio.system_json(s),
        results=results,
        all_hold=all(r["holds"] for r in results),
        tolerances={"rank_tol": 1e-9, "stab_tol": 0.0},
        warnings=[],
    )


def test_report_round_trip_is_byte_identical():
    for name in fixtures.names():
        text = fileio.dump_report(_analyze_doc(fixtures.system(name)))
        assert fileio.dump_report(fileio.load_report(text)) == text


def test_load_report_checks_format():
    with pytest.raises(InputError):
        fileio.load_report('{"format": "other/9", "command": "analyze"}')


def test_certificates_replay_from_json_alone():
    for name in fixtures.names():
        s = fixtures.system(name)
        doc = json.loads(fileio.dump_report(_analyze_doc(s)))
        schema("report.schema.json").validate(doc)
        for entry in doc["results"]:
            for verdict in entry["paths"].values():
                for c in verdict["certificates"]:
                    assert pt.replay_certificate(s, fileio.certificate_from_json(c))


@settings(max_examples=40, deadline=None)
@given(st.fractions(min_value=-100, max_value=100, max_denominator=50))
def test_scalar_encoding_is_lossless(x):
    assert fileio._scalar_from_json(json.loads(json.dumps(pt.scalar_json(x)))) == x


def test_complex_scalar_encoding():
    z = complex(1.5, -2.25)
    assert pt.scalar_json(z) == {"re": 1.5, "im": -2.25}
    assert fileio._scalar_from_json(pt.scalar_json(z)) == z
