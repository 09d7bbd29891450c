import pytest

from cartel_fringe import TABLE1

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def benchmark():
    return TABLE1


@pytest.fixture
def record():
    """Log one acceptance verdict line; the summary hook prints them all."""

    def _record(number: int, title: str, ok: bool, detail: str = "") -> bool:
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title}"
        if detail:
            line += f" -- {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
        terminalreporter.write_line(line)
