from fractions import Fraction as F

import pytest
from hypothesis import settings

from cochain_transfer.backends import build_circle, build_interval, build_square

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def interval2():
    return build_interval([F(0), F(1)])


@pytest.fixture(scope="session")
def interval3():
    return build_interval([F(0), F(1, 2), F(1)])


@pytest.fixture(scope="session")
def interval4():
    return build_interval([F(0), F(1, 3), F(3, 4), F(1)])


@pytest.fixture(scope="session")
def circle4():
    return build_circle(4)


@pytest.fixture(scope="session")
def square():
    return build_square()


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
