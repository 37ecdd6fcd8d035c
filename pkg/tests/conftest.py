"""Collects acceptance verdicts and prints one line per criterion at the end."""

ACCEPTANCE_LINES: dict[str, str] = {}


def record(criterion: str, passed: bool, detail: str) -> None:
    ACCEPTANCE_LINES[criterion] = f"{'PASS' if passed else 'FAIL'}  {criterion}: {detail}"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES, key=lambda k: int(k.split()[1])):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
