"""Shared test helpers; collects acceptance-criterion results for the summary."""

ACCEPTANCE_LINES = []


def record_criterion(number: int, passed: bool, detail: str) -> None:
    """Log one acceptance criterion verdict; shown again in the final summary."""
    line = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
