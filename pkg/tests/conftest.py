import numpy as np
import pytest

from swedecay.mesh import (build_plane_irregular, build_plane_regular,
                           build_sphere)

PLANE_LX = 5000e3
PLANE_LY = 4330e3


@pytest.fixture(scope="session")
def tiny_mesh():
    """Equilateral 4x4 lattice: 32 triangles, 48 edges, 16 dual cells."""
    return build_plane_regular(4, 4, 1.0, np.sqrt(3) / 2)


@pytest.fixture(scope="session")
def plane_mesh():
    """Benchmark-domain plane mesh at a small working resolution."""
    return build_plane_regular(16, 16, PLANE_LX, PLANE_LY)


@pytest.fixture(scope="session")
def irregular_mesh():
    return build_plane_irregular(16, 16, PLANE_LX, PLANE_LY, seed=11,
                                 refinement_factor=2.0)


@pytest.fixture(scope="session")
def sphere_mesh():
    return build_sphere(2, 6.371e6)


@pytest.fixture(scope="session")
def unit_sphere_mesh():
    return build_sphere(2, 1.0)


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)


def random_state(mesh, rng, h0=100.0, dv=1.0, dh=10.0):
    v = dv * rng.standard_normal(mesh.n_edges)
    h = h0 + dh * rng.random(mesh.n_cells)
    return v, h
