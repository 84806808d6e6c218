import pytest

_LINES: list[str] = []


@pytest.fixture
def criterion():
    """Record one pass/fail line for an acceptance criterion.

    Lines are echoed immediately (visible with ``-s``) and repeated in the
    terminal summary so they survive output capture.
    """
    def record(name: str, passed: bool, detail: str) -> bool:
        line = f"{name}: {'PASS' if passed else 'FAIL'}  {detail}"
        _LINES.append(line)
        print(line)
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)
