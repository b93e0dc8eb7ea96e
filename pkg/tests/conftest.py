import numpy as np
import pytest

from heatconv import make_grid


@pytest.fixture(scope="session")
def grid():
    """Default desk-scale grid: L = 16, N = 2048, h = 1/64."""
    return make_grid(16.0, 2048)


@pytest.fixture(scope="session")
def coarse_grid():
    return make_grid(8.0, 512)


def gaussian_values(x, sigma, center=0.0):
    """Independent closed-form Gaussian density (variance sigma)."""
    return np.exp(-((x - center) ** 2) / (2.0 * sigma)) / np.sqrt(2.0 * np.pi * sigma)
