import pytest

_LINES: list[str] = []


@pytest.fixture
def acceptance_report():
    """Record one summary line per acceptance criterion."""
    def add(number, ok, detail, elapsed, limit=None, gating=True):
        status = "PASS" if ok else "FAIL"
        if not gating:
            status += " (not gating)"
        budget = f" / limit {limit:g}s" if limit else ""
        line = f"criterion {number:>2}: {status}  [{elapsed:.2f}s{budget}]  {detail}"
        _LINES.append(line)
        print(line)
        return ok
    return add


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_LINES, key=lambda s: int(s.split(":")[0].split()[1])):
            terminalreporter.write_line(line)
