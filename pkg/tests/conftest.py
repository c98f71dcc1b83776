import pytest

_LINES: list[str] = []


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line for an acceptance criterion."""
    def record(number, ok: bool, detail: str = ""):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}" + (f"  {detail}" if detail else "")
        _LINES.append(line)
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)
