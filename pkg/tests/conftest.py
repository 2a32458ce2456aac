import pytest

_CRITERIA = []


@pytest.fixture
def criterion():
    """Record one acceptance verdict line; assert separately in the test."""

    def record(name, passed, detail=""):
        _CRITERIA.append((name, bool(passed), detail))
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _CRITERIA:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
