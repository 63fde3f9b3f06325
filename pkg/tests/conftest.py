import numpy as np
import pytest

from ssproj.experiments import cantor_ifs, carpet_ifs, line_hyperplane_ifs, sharpness_ifs, torus_r4_ifs
from ssproj.ifs import WeightedIFS


@pytest.fixture
def cantor():
    return cantor_ifs()


@pytest.fixture
def carpet():
    return carpet_ifs()


@pytest.fixture
def torus():
    return torus_r4_ifs()


@pytest.fixture
def tetra():
    return line_hyperplane_ifs()


@pytest.fixture
def product_cantor():
    return sharpness_ifs()


def single_map_ifs(ratio, rotation, translation):
    """One-map system (allowed to construct, rejected by validate)."""
    return WeightedIFS.from_parts([ratio], [rotation], [translation], [1.0])


def torus_generator(l1, l2):
    a = np.zeros((4, 4))
    a[1, 0], a[0, 1] = l1, -l1
    a[3, 2], a[2, 3] = l2, -l2
    return a


ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
