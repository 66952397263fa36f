import pytest

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
    n_fail = sum(line.startswith("[FAIL]") for line in ACCEPTANCE_LINES)
    terminalreporter.write_line(f"{len(ACCEPTANCE_LINES) - n_fail} passed, {n_fail} failed")
