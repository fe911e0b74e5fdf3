"""Shared test fixtures.

The acceptance module records one PASS/FAIL line per criterion; the
collected lines are printed as a dedicated section at the end of the
pytest run so the verdicts are visible at a glance.
"""

import pytest

_acceptance_lines = []


@pytest.fixture
def acceptance():
    """Return a recorder: acceptance(ok, label) logs the line, then asserts."""

    def _rec(ok, label):
        _acceptance_lines.append(("PASS" if ok else "FAIL") + ": " + label)
        assert ok, label

    return _rec


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
