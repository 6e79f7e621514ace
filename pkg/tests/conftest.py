import numpy as np
import pytest

from grushin.dims import Dims
from grushin.fields import SpectralField
from grushin.grid import GridSpec, make_grid
from grushin.hermite import multi_indices_upto


@pytest.fixture(scope="session")
def default_grid():
    return make_grid(Dims(1, 1), GridSpec())


@pytest.fixture(scope="session")
def riesz_grid():
    # Separated-path test grid: fine frequency lattice, modest box.
    return make_grid(Dims(1, 1), GridSpec(
        x1_extent=28.0, x1_count=56, x2_count=128,
        lambda_min=1.0 / 64.0, lambda_max=0.5, lambda_count=32))


@pytest.fixture(scope="session")
def dilation_grid():
    return make_grid(Dims(1, 1), GridSpec(
        x1_extent=16.0, x1_count=64, x2_count=256,
        lambda_min=1.0 / 16.0, lambda_max=4.0, lambda_count=64))


def random_field(grid, band, max_degree, seed, stride=1):
    rng = np.random.default_rng(seed)
    sel = (grid.lambda_abs >= band[0] - 1e-12) \
        & (grid.lambda_abs <= band[1] + 1e-12)
    idx = np.where(sel)[0][::stride]
    support = grid.lambda_points[idx]
    n_mu = len(multi_indices_upto(grid.dims.d1, max_degree))
    coeffs = rng.normal(size=(idx.size, n_mu)) \
        + 1j * rng.normal(size=(idx.size, n_mu))
    return SpectralField(grid.dims, support, max_degree, coeffs)
