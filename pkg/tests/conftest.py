import numpy as np
import pytest

from sbmspectral import SymMatrix


def path3():
    a = np.zeros((3, 3))
    a[0, 1] = a[1, 0] = a[1, 2] = a[2, 1] = 1
    return SymMatrix(a)


def complete(n, loops=False):
    a = np.ones((n, n))
    if not loops:
        np.fill_diagonal(a, 0)
    return SymMatrix(a)


def random_symmetric(rng, n):
    x = rng.standard_normal((n, n))
    return (x + x.T) / 2


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
