import pytest

from oracles import MATRIX_A, MATRIX_D

from cvame.matcore import ExactMatrix


@pytest.fixture
def matrix_a():
    return ExactMatrix(MATRIX_A)


@pytest.fixture
def matrix_d():
    return ExactMatrix(MATRIX_D)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
