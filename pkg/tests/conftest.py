import numpy as np
import pytest

from teamlab.info_struct import TeamSplit, from_channels, no_information, perfect_information
from teamlab.prob_core import FiniteSpace, JointDistribution

X = FiniteSpace("x", 2)
Y = FiniteSpace("y", 2)


def flip(p):
    return np.array([[1 - p, p], [p, 1 - p]])


@pytest.fixture
def binary_split():
    return TeamSplit((2,), (2,))


@pytest.fixture
def diagonal():
    return JointDistribution([X, Y], [0.5, 0, 0, 0.5])


@pytest.fixture
def uninformative(binary_split):
    return no_information([0.5, 0.5], binary_split)


@pytest.fixture
def perfect(binary_split):
    return perfect_information([0.5, 0.5], binary_split)


@pytest.fixture
def noisy(binary_split):
    return from_channels([0.5, 0.5], binary_split, [flip(0.25)])


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import LINES
    except ImportError:
        return
    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)
