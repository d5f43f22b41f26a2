import numpy as np
import pytest

import cauchylab as cl


@pytest.fixture
def right_triangle():
    """Unit-weight atoms at (0,0), (4,0), (0,3): circumradius 2.5."""
    return cl.new_measure([(0, 0), (4, 0), (0, 3)], [1, 1, 1])


@pytest.fixture
def two_atoms():
    """Half-weight atoms at 0 and 1 on the real axis."""
    return cl.new_measure([(0, 0), (1, 0)], [0.5, 0.5])


@pytest.fixture
def grid_square():
    """Uniform mass-1 measure: 16 x 16 atom grid on the unit square."""
    h = 1.0 / 16
    c = h / 2 + h * np.arange(16)
    xx, yy = np.meshgrid(c, c, indexing="ij")
    pts = np.stack([xx.ravel(), yy.ravel()], axis=1)
    return cl.new_measure(pts, np.full(256, 1.0 / 256))


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)


def random_planar_measure(rng, n, scale=1.0):
    pts = rng.uniform(-scale, scale, size=(n, 2))
    w = rng.uniform(0.2, 1.5, size=n)
    return cl.new_measure(pts, w)
