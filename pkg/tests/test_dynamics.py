"""Conservative tendency terms: zeros, balances, oracle agreement."""

import numpy as np
import pytest

from swedecay import operators as ops
from swedecay.dynamics import (PhysicalParams, adv_term, continuity_flux,
                               coriolis_dual, dual_depth, gradient_term,
                               kinetic_term, potential_vorticity)
from swedecay.errors import NumericsError
from swedecay.mesh import build_sphere

from helpers import constant_field
import oracles

F0 = 6.147e-5


class TestCoriolis:
    def test_f_plane_constant(self, plane_mesh):
        f = coriolis_dual(plane_mesh, PhysicalParams(f=F0))
        assert np.all(f == F0)

    def test_sphere_equator_and_pole(self):
        mesh = build_sphere(2, 6.371e6)
        omega = 7.292e-5
        f = coriolis_dual(mesh, PhysicalParams(omega=omega))
        z = mesh.vert_pos[:, 2] / mesh.radius
        equator = np.abs(z) < 1e-12
        assert equator.any()
        assert np.all(np.abs(f[equator]) < 1e-25)
        poles = np.abs(np.abs(z) - 1.0) < 1e-12
        assert poles.any()
        assert np.allclose(np.abs(f[poles]), 2 * omega, rtol=1e-12)

    def test_requires_a_spec(self, plane_mesh):
        with pytest.raises(ValueError):
            coriolis_dual(plane_mesh, PhysicalParams())


class TestAdvection:
    def test_zero_velocity(self, plane_mesh):
        f = np.full(plane_mesh.n_duals, F0)
        h = np.full(plane_mesh.n_cells, 100.0)
        out = adv_term(plane_mesh, np.zeros(plane_mesh.n_edges), h, f)
        assert np.all(out == 0)

    def test_irrotational_uniform_flow_no_coriolis(self, plane_mesh):
        # curl of a uniform field vanishes exactly, so with f = 0 every
        # vorticity factor is zero
        v = ops.normal_component(plane_mesh, constant_field([3.0, 1.0]))
        h = np.full(plane_mesh.n_cells, 100.0)
        out = adv_term(plane_mesh, v, h, np.zeros(plane_mesh.n_duals))
        scale = F0 * 3.0
        assert np.max(np.abs(out)) < 1e-11 * scale

    def test_matches_transcription_oracle(self, tiny_mesh, rng):
        m = tiny_mesh
        v = rng.standard_normal(m.n_edges)
        h = 10.0 + rng.random(m.n_cells)
        f = F0 * (1.0 + 0.3 * rng.random(m.n_duals))
        mine = adv_term(m, v, h, f)
        ref = oracles.adv_oracle(m, v, h, f)
        assert np.allclose(mine, ref, rtol=1e-12, atol=1e-20)

    def test_positivity_fault(self, tiny_mesh):
        h = np.full(tiny_mesh.n_cells, 1.0)
        h[0] = -3.0
        with pytest.raises(NumericsError):
            adv_term(tiny_mesh, np.ones(tiny_mesh.n_edges), h,
                     np.zeros(tiny_mesh.n_duals))


class TestKinetic:
    def test_zero(self, plane_mesh):
        assert np.all(kinetic_term(plane_mesh, np.zeros(plane_mesh.n_edges)) == 0)

    def test_uniform_speed_equilateral(self, tiny_mesh):
        # uniform flow on the equilateral lattice gives a constant kinetic
        # density, hence zero gradient
        v = ops.normal_component(tiny_mesh, constant_field([2.0, 0.5]))
        out = kinetic_term(tiny_mesh, v)
        assert np.max(np.abs(out)) < 1e-10

    def test_matches_oracle(self, irregular_mesh, rng):
        v = rng.standard_normal(irregular_mesh.n_edges)
        assert np.allclose(kinetic_term(irregular_mesh, v),
                           oracles.kinetic_oracle(irregular_mesh, v),
                           rtol=1e-12, atol=1e-20)


class TestGradientTerm:
    def test_flat_surface(self, plane_mesh, rng):
        eta = rng.random(plane_mesh.n_cells)
        h = 5.0 - eta
        out = gradient_term(plane_mesh, h, eta, 9.81)
        assert np.max(np.abs(out)) < 1e-18

    def test_unit_step(self, tiny_mesh):
        m = tiny_mesh
        e = 11
        h = np.zeros(m.n_cells)
        h[m.edge_cells[e, 1]] = 1.0
        out = gradient_term(m, h, np.zeros(m.n_cells), 9.81)
        assert out[e] == pytest.approx(9.81 / m.dual_len[e], rel=1e-13)

    def test_gauge_invariance(self, plane_mesh, rng):
        h = 10.0 + rng.random(plane_mesh.n_cells)
        eta = rng.random(plane_mesh.n_cells)
        a = gradient_term(plane_mesh, h, eta, 9.81)
        b = gradient_term(plane_mesh, h + 2.5, eta - 2.5, 9.81)
        assert np.allclose(a, b, rtol=1e-12, atol=1e-18)


class TestContinuity:
    def test_zero_velocity(self, plane_mesh):
        h = np.full(plane_mesh.n_cells, 7.0)
        assert np.all(continuity_flux(plane_mesh, np.zeros(plane_mesh.n_edges), h) == 0)

    def test_uniform_flow_constant_depth(self, plane_mesh):
        v = ops.normal_component(plane_mesh, constant_field([1.0, 2.0]))
        h = np.full(plane_mesh.n_cells, 7.0)
        out = continuity_flux(plane_mesh, v, h)
        assert np.max(np.abs(out)) < 1e-16

    def test_global_mass_neutrality(self, irregular_mesh, rng):
        m = irregular_mesh
        v = rng.standard_normal(m.n_edges)
        h = 10.0 + rng.random(m.n_cells)
        flux = continuity_flux(m, v, h)
        total = ops.ip_cell(m, np.ones(m.n_cells), flux)
        scale = np.sum(m.cell_area * np.abs(flux))
        assert abs(total) < 1e-13 * scale


class TestPotentialVorticity:
    def test_rest_state(self, plane_mesh):
        h = np.full(plane_mesh.n_cells, 200.0)
        f = np.full(plane_mesh.n_duals, F0)
        q = potential_vorticity(plane_mesh, np.zeros(plane_mesh.n_edges), h, f)
        assert np.allclose(q, F0 / 200.0, rtol=1e-13)

    def test_dual_depth_weights(self, plane_mesh):
        h = np.full(plane_mesh.n_cells, 3.25)
        assert np.allclose(dual_depth(plane_mesh, h), 3.25, rtol=1e-13)

    def test_matches_oracle(self, tiny_mesh, rng):
        m = tiny_mesh
        v = rng.standard_normal(m.n_edges)
        h = 10.0 + rng.random(m.n_cells)
        f = np.full(m.n_duals, F0)
        q = potential_vorticity(m, v, h, f)
        curl_ref = oracles.curl_oracle(m, v)
        hz = oracles.dual_vector_oracle(m, h[:, None])[:, 0]
        assert np.allclose(q, (curl_ref + f) / hz, rtol=1e-12)

    def test_positivity_fault(self, tiny_mesh):
        h = np.full(tiny_mesh.n_cells, -1.0)
        with pytest.raises(NumericsError):
            potential_vorticity(tiny_mesh, np.zeros(tiny_mesh.n_edges), h,
                                np.zeros(tiny_mesh.n_duals))


def test_lake_at_rest_is_steady(plane_mesh, rng):
    """h + eta_b constant and V = 0: every tendency term vanishes exactly."""
    m = plane_mesh
    eta = 100.0 * rng.random(m.n_cells)
    h = 500.0 - eta
    v = np.zeros(m.n_edges)
    f = np.full(m.n_duals, F0)
    assert np.all(adv_term(m, v, h, f) == 0)
    assert np.all(kinetic_term(m, v) == 0)
    assert np.max(np.abs(gradient_term(m, h, eta, 9.81))) < 1e-18
    assert np.all(continuity_flux(m, v, h) == 0)
