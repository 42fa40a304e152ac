import pytest

_LINES = []


@pytest.fixture
def criterion():
    """Record one acceptance line; returns ``passed`` so the test can assert on it."""
    def record(number, passed, detail):
        _LINES.append(f"CRITERION {number}: {'PASS' if passed else 'FAIL'} {detail}")
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
