"""Shared grids and solutions"""

import numpy as np
import pytest

from src.core.grid_function import GridFunction
from src.database.manager import RunLedger
from src.peakons.dynamics import PeakonState


@pytest.fixture
def grid():
    """Default experiment grid, L=20 with 4096 nodes"""
    return GridFunction.zeros(20.0, 4096)


@pytest.fixture
def coarse_grid():
    return GridFunction.zeros(20.0, 1024)


@pytest.fixture
def bump(coarse_grid):
    """0.5 e^{-x²}"""
    return coarse_grid.like(0.5 * np.exp(-coarse_grid.x ** 2))


@pytest.fixture
def fine_bump(grid):
    return grid.like(0.5 * np.exp(-grid.x ** 2))


@pytest.fixture
def peakon_pair():
    """p = (1, -0.5) at q = (-0.5, 0.5)"""
    return PeakonState(0.0, np.array([1.0, -0.5]), np.array([-0.5, 0.5]))


@pytest.fixture
def ledger(tmp_path):
    return RunLedger(f"sqlite:///{tmp_path / 'runs.db'}")
