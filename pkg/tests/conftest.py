import pytest

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def verdict():
    """Record one acceptance line, print it, and fail the test when the criterion is not met."""

    def _record(label: str, ok: bool, detail: str, elapsed: float, limit: float):
        within = elapsed < limit
        passed = bool(ok) and within
        line = (f"{'PASS' if passed else 'FAIL'}  {label}: {detail} "
                f"[{elapsed:.1f}s / limit {limit:g}s]")
        _ACCEPTANCE_LINES.append(line)
        print(line)
        assert within, f"{label}: runtime {elapsed:.1f}s exceeds {limit}s"
        assert ok, line

    return _record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
