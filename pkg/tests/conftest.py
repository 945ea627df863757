import numpy as np
import pytest

from homspace import gallery
from homspace.dyadic import build_cubes, build_nets, default_constants
from homspace.space import FiniteHomSpace

from helpers import unit_spaced_grid


def build_system(space, seed=0xD1AD1C, **kwargs):
    delta, c0, C0 = default_constants(space, **kwargs)
    net = build_nets(space, delta, c0, C0, seed=seed)
    return build_cubes(net, space)


@pytest.fixture(scope="session")
def grid64():
    return gallery.build(gallery.GallerySpec(kind="euclidean_grid", n=64, dim=1))


@pytest.fixture(scope="session")
def grid64_cubes(grid64):
    return build_system(grid64)


@pytest.fixture(scope="session")
def grid16_spaced():
    return unit_spaced_grid(16)


@pytest.fixture(scope="session")
def grid16_cubes(grid16_spaced):
    return build_system(grid16_spaced)


@pytest.fixture(scope="session")
def four_point():
    # two far-apart pairs: at level 0 every point is its own cube, three of
    # them fresh; masses are 0.25 each
    coords = np.array([0.0, 1.0, 10.0, 11.0])[:, None]
    dist = np.abs(coords[:, None, 0] - coords[None, :, 0])
    return FiniteHomSpace(dist=dist, weight=np.full(4, 0.25), coords=coords)


@pytest.fixture(scope="session")
def four_point_cubes(four_point):
    return build_system(four_point)
