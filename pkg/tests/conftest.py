"""Shared test plumbing: the acceptance scoreboard.

Acceptance tests record one line per criterion through the ``acceptance``
fixture; the terminal summary prints every recorded line with its verdict
so the whole gate is readable at the end of any pytest run.
"""

import pytest

_RESULTS = []


@pytest.fixture
def acceptance():
    """Returns check(label, ok, detail): records a scoreboard line, then asserts."""

    def check(label: str, ok: bool, detail: str = ""):
        _RESULTS.append((label, bool(ok), detail))
        assert ok, f"{label}: {detail}"

    return check


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, detail in _RESULTS:
        verdict = "PASS" if ok else "FAIL"
        line = f"[{verdict}] {label}"
        if detail:
            line += f"  |  {detail}"
        terminalreporter.write_line(line)
