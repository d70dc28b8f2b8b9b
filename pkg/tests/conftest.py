"""Collects acceptance outcomes and prints one line per criterion at the end of the run."""

RESULTS: dict[int, tuple[bool, str]] = {}


def record(criterion: int, passed: bool, detail: str) -> bool:
    RESULTS[criterion] = (bool(passed), detail)
    return bool(passed)


def summary_lines() -> list[str]:
    return [f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}" for k, (ok, detail) in sorted(RESULTS.items())]


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in summary_lines():
        terminalreporter.write_line(line)
