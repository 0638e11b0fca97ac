"""Shared pytest hooks.

Acceptance tests append one verdict line each to ``ACCEPTANCE_LINES``; the
lines are printed together at the end of the run so they are visible without
``-s``.
"""

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
        terminalreporter.write_line(line)
