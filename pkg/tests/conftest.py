import numpy as np
import pytest

from frachardy.quadrature.functionals import QuadratureSpec


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def mc_spec():
    return QuadratureSpec(engine="monte_carlo", samples=100_000, seed=1)
