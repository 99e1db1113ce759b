from __future__ import annotations

import pytest

# acceptance criterion number -> (passed, summary line)
CRITERIA: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def record():
    def _record(number: int, passed: bool, summary: str) -> None:
        CRITERIA[number] = (passed, summary)
        print(f"criterion {number}: {'PASS' if passed else 'FAIL'} - {summary}")

    return _record


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number in sorted(CRITERIA):
        passed, summary = CRITERIA[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'} - {summary}")
