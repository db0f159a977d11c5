import numpy as np
import pytest

from onestable import cylindrical, isotropic, symmetrize
from onestable.spectral import sphere_mean_abs_cos


@pytest.fixture(scope="session")
def cauchy1():
    return cylindrical(1)


@pytest.fixture(scope="session")
def cyl2():
    return cylindrical(2)


@pytest.fixture(scope="session")
def cyl3():
    return cylindrical(3)


@pytest.fixture(scope="session")
def iso2():
    # total mass normalized so Phi(lam) = |lam|
    return isotropic(2, 1.0 / sphere_mean_abs_cos(2))


@pytest.fixture(scope="session")
def skew2():
    """Two non-orthogonal ray pairs with unequal masses."""
    mu, _ = symmetrize(
        [
            (np.array([1.0, 0.0]), 1.4),
            (np.array([np.cos(0.4), np.sin(0.4)]), 1.8),
        ],
        dimension=2,
    )
    return mu
