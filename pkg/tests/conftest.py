import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

_outcomes = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, summary): acceptance criterion checked by this test")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call":
        return
    number, summary = marker.args
    passed = call.excinfo is None
    prev = _outcomes.get(number, (summary, True, None))
    detail = prev[2]
    if not passed:
        detail = str(call.excinfo.value).splitlines()[0] if str(call.excinfo.value) else call.excinfo.typename
    _outcomes[number] = (summary, prev[1] and passed, detail)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_outcomes):
        summary, passed, detail = _outcomes[number]
        line = f"{'PASS' if passed else 'FAIL'} {number:>2}  {summary}"
        if not passed and detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)
