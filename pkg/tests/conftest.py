"""Shared pytest wiring.

The acceptance tests hand their one-line verdicts to `acceptance_log` so
they survive output capture and get replayed in the terminal summary.
"""

import pytest

_acceptance_lines: list[str] = []


@pytest.fixture
def acceptance_log():
    return _acceptance_lines.append


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _acceptance_lines:
        terminalreporter.section("acceptance")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
