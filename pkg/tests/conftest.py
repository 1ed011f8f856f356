"""Shared pytest plumbing for the acceptance suite.

Acceptance tests report through the `verdict` fixture so every criterion
leaves exactly one [PASS]/[FAIL] line; the lines are replayed in a
terminal section at the end of the run, where capture cannot hide them.
"""

import pytest

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def verdict():
    def _verdict(ok: bool, label: str, detail: str) -> None:
        line = "[%s] %s: %s" % ("PASS" if ok else "FAIL", label, detail)
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return _verdict


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
