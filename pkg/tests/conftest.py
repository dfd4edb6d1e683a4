"""
Shared fixtures
"""
import numpy as np
import pytest

from pwca_milp.config import FitConfig, OptimizerOptions
from pwca_milp.core.dataset import Box, Dataset, grid_points


@pytest.fixture
def unit_box():
    return Box([0.0, 0.0], [1.0, 1.0])


@pytest.fixture
def product_data(unit_box):
    """y = x1 * x2 on an 11 x 11 grid"""
    x = grid_points(unit_box, 11)
    return Dataset(x, x[:, 0] * x[:, 1], unit_box)


@pytest.fixture
def parabola_data():
    """y = x^2 on [-1, 1]"""
    x = np.linspace(-1.0, 1.0, 41)
    return Dataset(x.reshape(-1, 1), x ** 2)


@pytest.fixture
def abs_data():
    """y = |x| on [-1, 1], exactly a max of two lines"""
    x = np.linspace(-1.0, 1.0, 41)
    return Dataset(x.reshape(-1, 1), np.abs(x))


@pytest.fixture
def fast_config():
    """Small budgets for tests"""
    return FitConfig(
        optimizer=OptimizerOptions(max_iterations=2000, restarts=2, seed=0),
        sweep_iterations_per_param=20,
    )


@pytest.fixture
def tight_config():
    """Tolerances tight enough to recover exact models"""
    return FitConfig(
        optimizer=OptimizerOptions(max_iterations=20000, x_tolerance=1e-10,
                                   f_tolerance=1e-14, restarts=3, seed=0),
        penalty_scale=0.0,
    )
