"""Collects acceptance-criterion outcomes and prints one PASS/FAIL line each."""

from __future__ import annotations

_OUTCOMES = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion checked by the test")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when not in ("setup", "call"):
        return
    number, title = marker.args
    failed = call.excinfo is not None
    if call.when == "setup" and not failed:
        return
    _OUTCOMES[number] = (title, "FAIL" if failed else "PASS")


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_OUTCOMES):
        title, outcome = _OUTCOMES[number]
        terminalreporter.write_line(f"{outcome} criterion {number}: {title}")
