import numpy as np
import pytest

from macplasma.mesh import GridSpec, NEUMANN, PERIODIC, build_mesh


@pytest.fixture
def mesh_1d_periodic():
    return build_mesh(GridSpec.uniform([4], boundary=PERIODIC))


@pytest.fixture
def mesh_1d_wall():
    return build_mesh(GridSpec.uniform([4], boundary=NEUMANN))


@pytest.fixture
def mesh_2d_periodic():
    return build_mesh(GridSpec.uniform([4, 4], boundary=PERIODIC))


@pytest.fixture
def mesh_2d_wall():
    return build_mesh(GridSpec.uniform([4, 4], boundary=NEUMANN))


def random_zero_trace(mesh, rng):
    """Random face velocity with zero exterior trace."""
    v = []
    for fs in mesh.faces:
        vi = rng.standard_normal(fs.n_faces)
        vi[fs.exterior] = 0.0
        v.append(vi)
    return v


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
