"""Reporting hook: one PASS/FAIL line per numbered acceptance criterion."""

import pytest

_LINES = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): numbered acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    n, title = mark.args
    failed = rep.failed or (rep.when == "setup" and rep.skipped)
    if rep.when == "call" or failed:
        status = "FAIL" if failed else "PASS"
        if _LINES.get(n, ("PASS",))[0] != "FAIL":
            _LINES[n] = (status, title, rep.duration)


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_LINES):
        status, title, secs = _LINES[n]
        terminalreporter.write_line(f"criterion {n:2d}: {status}  {title} ({secs:.1f}s)")
