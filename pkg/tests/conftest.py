import math

import pytest

from wienerlab.field import make_grid, make_shear_grid, synthesize
from wienerlab.schemas.grid import GaussianProfile, Side
from wienerlab.schemas.timefreq import WindowKind
from wienerlab.settings import get_settings
from wienerlab.stft import make_window


@pytest.fixture(autouse=True)
def fresh_settings():
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def grid():
    return make_grid(1, 16.0, 256)


@pytest.fixture
def shear_grid():
    return make_shear_grid(1, 256)


@pytest.fixture
def gaussian(grid):
    return synthesize(grid, GaussianProfile())


@pytest.fixture
def gaussian_window(grid):
    return make_window(grid, WindowKind.GAUSSIAN)


@pytest.fixture(scope="session")
def operator_grid():
    """Reduced operator grid: integer frequencies are samples and |xi| reaches 16."""
    return make_grid(1, 256 * math.pi, 8192)


@pytest.fixture(scope="session")
def operator_windows(operator_grid):
    phi = make_window(operator_grid, WindowKind.BUMP, side=Side.FREQUENCY)
    g = make_window(operator_grid, WindowKind.GAUSSIAN, width=4.0)
    return phi, g
