import pytest

_LINES: list[tuple[int, str]] = []


@pytest.fixture
def record():
    """Collect a one-line PASS/FAIL verdict for the acceptance summary."""

    def _record(number: int, ok: bool, text: str) -> bool:
        _LINES.append((number, f"criterion {number}: {'PASS' if ok else 'FAIL'}  {text}"))
        return ok

    return _record


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_LINES):
        terminalreporter.write_line(line)
