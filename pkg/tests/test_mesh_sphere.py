"""Icosahedral sphere meshes: combinatorics, areas, kites, orientation."""

import numpy as np
import pytest

from swedecay.mesh import build_sphere, validate


def test_icosahedron_counts():
    m = build_sphere(0, 1.0)
    assert (m.n_cells, m.n_edges, m.n_duals) == (20, 30, 12)
    # every dual cell of the base icosahedron is a pentagon
    assert np.all(np.diff(m.dual_cell_ptr) == 5)


def test_refinement_counts():
    for level in (1, 2, 3):
        m = build_sphere(level, 1.0)
        assert m.n_cells == 20 * 4 ** level
        assert m.n_edges == 30 * 4 ** level
        assert m.n_duals == 10 * 4 ** level + 2


@pytest.mark.slow
def test_paper_resolution_level6():
    m = build_sphere(6, 6.37122e6)
    assert m.n_cells == 81920
    area = 4 * np.pi * m.radius ** 2
    assert abs(m.total_area - area) / area < 1e-10


def test_total_area_matches_sphere():
    for level in (0, 2, 3):
        m = build_sphere(level, 6.371e6)
        area = 4 * np.pi * m.radius ** 2
        assert abs(m.total_area - area) / area < 1e-10
        assert abs(np.sum(m.dual_area) - area) / area < 1e-10


def test_kite_partition_residual_level3():
    m = build_sphere(3, 6.371e6)
    res = np.abs(m.kites.sum(axis=1) - m.cell_area) / m.cell_area
    assert res.max() < 1e-10
    dual_sum = np.add.reduceat(m.dual_kite, m.dual_cell_ptr[:-1])
    assert np.max(np.abs(dual_sum - m.dual_area) / m.dual_area) < 1e-10


def test_dual_area_against_polygon_excess_oracle(unit_sphere_mesh):
    """Spherical polygon area via the angle-sum (Girard) formula."""
    m = unit_sphere_mesh
    for z in (0, 5, m.n_duals - 1):
        lo, hi = m.dual_cell_ptr[z], m.dual_cell_ptr[z + 1]
        poly = m.cell_center[m.dual_cell[lo:hi]]
        nvert = hi - lo
        angles = 0.0
        for k in range(nvert):
            a = poly[(k - 1) % nvert]
            b = poly[k]
            c = poly[(k + 1) % nvert]
            ta = a - b * np.dot(a, b)
            tc = c - b * np.dot(c, b)
            angles += np.arccos(np.clip(
                np.dot(ta, tc) / np.linalg.norm(ta) / np.linalg.norm(tc),
                -1, 1))
        excess = angles - (nvert - 2) * np.pi
        assert m.dual_area[z] == pytest.approx(excess, rel=1e-10)


def test_geometry_is_tangent_and_geodesic(unit_sphere_mesh):
    m = unit_sphere_mesh
    # normals and tangents lie in the tangent plane at the edge midpoint
    khat = m.edge_mid / m.radius
    assert np.max(np.abs(np.einsum("ed,ed->e", m.edge_normal, khat))) < 1e-12
    assert np.max(np.abs(np.einsum("ed,ed->e", m.edge_tangent, khat))) < 1e-12
    assert np.allclose(np.cross(khat, m.edge_normal), m.edge_tangent)
    # edge lengths are geodesic distances between the endpoint vertices
    va = m.vert_pos[m.edge_duals[:, 0]]
    vb = m.vert_pos[m.edge_duals[:, 1]]
    ang = np.arccos(np.clip(np.einsum("ed,ed->e", va, vb), -1, 1))
    assert np.allclose(m.edge_len, ang, rtol=1e-12)


def test_validate_level3():
    assert validate(build_sphere(3, 6.371e6)).ok
