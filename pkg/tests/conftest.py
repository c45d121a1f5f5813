import numpy as np
import pytest

from rhcexcite.core import Constraints
from rhcexcite.criterion import DistanceDataset, build_psi

ACCEPTANCE_LINES = []


@pytest.fixture
def box2():
    return Constraints((-1.0, 1.0), [[-1.0, 1.0], [-1.0, 1.0]])


@pytest.fixture
def unit_box():
    return Constraints((0.0, 1.0), [[0.0, 1.0], [0.0, 1.0]])


@pytest.fixture
def psi15(box2):
    P = build_psi(box2, (15, 15))
    return DistanceDataset(P, np.ones(len(P)))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
