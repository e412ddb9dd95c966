import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None)
settings.load_profile("default")

ACCEPTANCE_LINES: list = []


@pytest.fixture
def report():
    def emit(k, passed: bool, detail: str) -> None:
        line = f"criterion {str(k):>2s}: {'PASS' if passed else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
    return emit


def _order(line: str):
    label = line.split(":")[0].split()[-1]
    return int(label.rstrip("ab")), label


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=_order):
            terminalreporter.write_line(line)
