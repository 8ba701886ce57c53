import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from _report import ACCEPTANCE_LINES  # noqa: E402
from hyperhybrid.circuit import ys_basis  # noqa: E402


@pytest.fixture
def basis8():
    return ys_basis()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
