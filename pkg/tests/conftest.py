import numpy as np
import pytest

import datasource.scenarios as scenarios
import models.fields as fields


@pytest.fixture
def grid():
    return fields.make_grid(2 * np.pi, 64)


@pytest.fixture
def unit():
    return fields.PhysParams(a=1.0, b=1.0)


@pytest.fixture
def params():
    return fields.PhysParams(a=0.7, b=1.3)


@pytest.fixture
def packet_grid():
    return fields.make_grid(80.0, 2048)


@pytest.fixture
def random_state():
    def make(seed: int, grid: fields.Grid, kmax_fraction: float = 0.25, zero_mean_v: bool = True):
        return scenarios.random_band_limited(seed, kmax_fraction, grid, zero_mean_v=zero_mean_v)
    return make


def real(grid: fields.Grid, values) -> fields.RealField:
    return fields.RealField(grid, values)


def cplx(grid: fields.Grid, values) -> fields.ComplexField:
    return fields.ComplexField(grid, values)


def roundoff_floor(grid: fields.Grid, order: int) -> float:
    """Sampling round-off after an order-th spectral derivative: 10·eps·k_max^order."""
    return 10 * np.finfo(float).eps * grid.k_max ** order
