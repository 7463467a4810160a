import pytest

_LINES = []


@pytest.fixture
def criterion():
    """Record one acceptance line: criterion(number, checks) with checks a dict of name -> bool."""
    def record(number, title, checks, detail=""):
        ok = all(checks.values())
        failed = [k for k, v in checks.items() if not v]
        line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}"
        if detail:
            line += f"  [{detail}]"
        if failed:
            line += f"  failed: {', '.join(failed)}"
        _LINES.append((number, line))
        print(line)
        assert ok, line
    return record


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_LINES):
            terminalreporter.write_line(line)
