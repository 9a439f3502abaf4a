import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

# (criterion number, passed, detail) lines collected by the acceptance suite
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number, ok, detail in sorted(ACCEPTANCE_LINES, key=lambda t: t[0]):
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture(scope="session")
def record():
    """record(number, ok, detail) logs one criterion line for the summary."""
    def _record(number, ok, detail):
        ACCEPTANCE_LINES.append((number, bool(ok), detail))
        print(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")
        return ok
    return _record
