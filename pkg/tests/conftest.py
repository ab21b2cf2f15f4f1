import os

import pytest

# audit fan-out is deterministic either way; one worker keeps timings stable
os.environ.setdefault("QHORN_THREADS", "1")

_ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance_line():
    """Record one PASS/FAIL line, printed in the terminal summary."""

    def record(number: int, ok: bool, detail: str):
        _ACCEPTANCE_LINES.append((number, f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}"))
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
