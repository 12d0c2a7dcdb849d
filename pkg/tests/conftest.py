import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_VERDICTS: list[tuple[str, str]] = []


@pytest.fixture
def verdict(request):
    """Record a PASS/FAIL line for an acceptance criterion."""
    label = request.node.get_closest_marker("criterion").args[0]
    yield label
    rep = getattr(request.node, "rep_call", None)
    ok = rep is not None and rep.passed
    _VERDICTS.append((label, "PASS" if ok else "FAIL"))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for label, status in sorted(_VERDICTS, key=lambda v: int(v[0].split()[0])):
        terminalreporter.write_line(f"{status}  criterion {label}")
