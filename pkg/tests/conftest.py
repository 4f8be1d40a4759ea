import math
from pathlib import Path

import numpy as np
import pytest

from pointer_sim.pointer import MeasurementConfig, PointerGrid, gaussian_pointer
from pointer_sim.system import Projector, SystemState

SCENARIO_DIR = Path(__file__).resolve().parent.parent / "scenarios"
INV_SQRT2 = 1 / math.sqrt(2)


@pytest.fixture
def grid():
    return PointerGrid.from_bounds(-20.0, 20.0, 1024)


@pytest.fixture
def phi(grid):
    return gaussian_pointer(grid, center=0.0, sigma=1.0)


@pytest.fixture
def qubit_projector():
    """A = |0><0|."""
    return Projector(np.array([[1, 0], [0, 0]]))


@pytest.fixture
def ket0():
    return SystemState([1, 0])


@pytest.fixture
def ket1():
    return SystemState([0, 1])


@pytest.fixture
def plus():
    return SystemState([INV_SQRT2, INV_SQRT2])


@pytest.fixture
def anomalous_post():
    """Postselection giving A_w = 1 + 1/sqrt(2) with `plus` preselection."""
    return SystemState([math.cos(-math.pi / 8), math.sin(-math.pi / 8)])


@pytest.fixture
def complex_post():
    """Postselection giving A_w = 0.5 + 0.5i with `plus` preselection."""
    return SystemState([INV_SQRT2, 1j * INV_SQRT2])


@pytest.fixture
def cfg2():
    return MeasurementConfig(gamma=2.0)


@pytest.fixture
def scenario_dir():
    return SCENARIO_DIR
