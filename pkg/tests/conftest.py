import numpy as np
import pytest

from promptfab.kinematics import load_arm_profile, load_profile_dict
from promptfab.voxel import ComponentSpec, VoxelGrid

import oracles
from promptfab.mesh import TriangleMesh, parse_mesh


@pytest.fixture(scope="session")
def arm():
    return load_arm_profile()


@pytest.fixture(scope="session")
def profile_dict():
    return load_profile_dict()


@pytest.fixture
def spec():
    return ComponentSpec()


@pytest.fixture
def unit_cube():
    """Unit cube parsed from hand-built binary STL bytes."""
    return parse_mesh(oracles.stl_binary_bytes(oracles.box_corners((0, 0, 0), (1, 1, 1))), "stl_binary")


def make_grid(cells, cell_size=0.05, origin=None):
    """VoxelGrid over explicit integer cells, dims fit to the cells.

    Default origin centers the footprint on the plate (like voxelize
    output after scaling), keeping every cell inside the arm's sweet spot.
    """
    cells = frozenset(tuple(c) for c in cells)
    dims = tuple(max(c[a] for c in cells) + 1 for a in range(3))
    if origin is None:
        origin = (-dims[0] * cell_size / 2, -dims[1] * cell_size / 2, 0.0)
    return VoxelGrid(
        origin=np.asarray(origin, float),
        cell_size=np.asarray([cell_size] * 3, float),
        dims=dims,
        occupied=cells,
    )


@pytest.fixture
def grid_factory():
    return make_grid
