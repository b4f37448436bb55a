"""Selective-decay (enstrophy-bracket) dissipation and the biharmonic
baseline.

The selective-decay tendency is assembled in four stages:

1. ``casimir_gradient``    edge representative of the enstrophy functional
                           derivative, 2 grad_t(q) / hbar;
2. ``discrete_commutator`` vector-field bracket of that field with the
                           velocity, via div/reconstruction/cross-product;
3. ``lie_projection``      projection of the momentum Lie derivative of
                           the bracket one-form onto edge values;
4. ``casimir_tendency``    normalization back to a velocity tendency.

The projection's pairing against the velocity, sum |e| L V, vanishes for
the underlying semi-discrete bracket but not identically for this edge
formula; the residual is small on smooth states (measured around 1e-5
relative on balanced fields, growing toward 1e-1 on grid-scale noise)
and the long-run energy behavior is governed by the acceptance
benchmarks.  The formula's orientation (which curl summand carries which
sign) is fixed by requiring edge-orientation equivariance together with
consistency with the vorticity transport term of the momentum equation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import _companion_sums, check_positive
from .mesh import Mesh
from . import operators as ops

# Overall orientation of the selective-decay forcing, fixed once by
# requiring enstrophy decay (d enstrophy/dt <= 0) on the vortex benchmark.
CASIMIR_SIGN = 1.0

# Coefficient unit conversions (configs carry the benchmark units).
# theta is stored in km^4*day: that is the reading of the benchmark
# coefficients consistent with the momentum equation's dimensions
# (theta * L / (2 |de| hbar) must be an acceleration), and the one that
# reproduces the published enstrophy-decay rates at theta = 2.
KM4_PER_DAY_TO_SI = 1.0e12 / 86400.0          # km^4/day  -> m^4/s
KM4_DAY_TO_SI = 1.0e12 * 86400.0              # km^4*day  -> m^4*s


@dataclass
class DissipationConfig:
    """Dissipation mode and coefficients in benchmark units.

    ``theta`` is the selective-decay coefficient (km^4*day), ``nu`` the
    biharmonic viscosity (km^4/day); both are converted to SI on access.
    """
    mode: str = "none"                  # none | casimir | biharmonic
    theta: float = 0.0
    nu: float = 0.0

    def __post_init__(self):
        if self.mode not in ("none", "casimir", "biharmonic"):
            raise ValueError(f"unknown dissipation mode {self.mode!r}")
        if self.theta < 0 or self.nu < 0:
            raise ValueError("dissipation coefficients must be >= 0")

    @property
    def theta_si(self) -> float:
        return self.theta * KM4_DAY_TO_SI

    @property
    def nu_si(self) -> float:
        return self.nu * KM4_PER_DAY_TO_SI


def casimir_gradient(mesh: Mesh, q_dual: np.ndarray, h: np.ndarray) -> np.ndarray:
    """Edge representative of the enstrophy variational derivative."""
    hbar = ops.edge_average(mesh, h)
    check_positive("edge depth", hbar)
    return 2.0 * ops.grad_t(mesh, q_dual) / hbar


def discrete_commutator(mesh: Mesh, u_edge: np.ndarray,
                        v_edge: np.ndarray) -> np.ndarray:
    """Edge-normal bracket [u, v] = u div v - v div u - curl(u x v).

    The divergence factors are cell averages of the two adjacent cells;
    the cross-product term uses Perot reconstructions collected on dual
    cells and the tangential derivative adjoint to the curl.
    """
    div_u = ops.edge_average(mesh, ops.div(mesh, u_edge))
    div_v = ops.edge_average(mesh, ops.div(mesh, v_edge))
    u_dual = ops.reconstruct_dual(mesh, ops.reconstruct_cell(mesh, u_edge))
    v_dual = ops.reconstruct_dual(mesh, ops.reconstruct_cell(mesh, v_edge))
    if mesh.dim == 2:
        cross = u_dual[:, 0] * v_dual[:, 1] - u_dual[:, 1] * v_dual[:, 0]
    else:
        cross = np.einsum("vd,vd->v", np.cross(u_dual, v_dual), mesh.dual_vertical)
    # -(curl(u x v)).n == +grad_t(cross) with this mesh's tangent convention
    return u_edge * div_v - v_edge * div_u + ops.grad_t(mesh, cross)


def _vw_cell_sums(mesh: Mesh, v: np.ndarray, w: np.ndarray) -> np.ndarray:
    e = mesh.cell_edges
    vals = mesh.edge_len[e] * mesh.dual_len[e] * v[e] * w[e]
    return vals.sum(axis=1) / mesh.cell_area


def lie_projection(mesh: Mesh, v: np.ndarray, h: np.ndarray,
                   w_edge: np.ndarray) -> np.ndarray:
    """Projected momentum-form Lie derivative of h W along the flow of V.

    Four summands per edge: the vorticity of W at each endpoint dual
    vertex times kite-weighted depth fluxes over the companion edges
    (minus endpoint positive, plus endpoint negative, mirroring the
    vorticity transport term), a cell difference of |e||e~| V W sums, and
    a mass-flux-divergence term.
    """
    curl_w = ops.curl(mesh, w_edge)
    q_minus, q_plus = _companion_sums(mesh, v, h)
    s_cell = _vw_cell_sums(mesh, v, w_edge)
    hbar = ops.edge_average(mesh, h)
    div_vh = ops.edge_average(mesh, ops.div(mesh, v * hbar))
    i, j = mesh.edge_cells[:, 0], mesh.edge_cells[:, 1]
    return (curl_w[mesh.edge_duals[:, 0]] * q_minus
            - curl_w[mesh.edge_duals[:, 1]] * q_plus
            + hbar * (s_cell[i] - s_cell[j])
            + div_vh * 2.0 * mesh.dual_len * w_edge)


def casimir_tendency_from_gradient(mesh: Mesh, v: np.ndarray, h: np.ndarray,
                                   grad_c: np.ndarray,
                                   theta_si: float) -> np.ndarray:
    """Selective-decay tendency with a prescribed functional-derivative field."""
    w = discrete_commutator(mesh, grad_c, v)
    lie = lie_projection(mesh, v, h, w)
    hbar = ops.edge_average(mesh, h)
    return CASIMIR_SIGN * theta_si * lie / (2.0 * mesh.dual_len * hbar)


def casimir_tendency(mesh: Mesh, v: np.ndarray, h: np.ndarray,
                     f_dual: np.ndarray, theta_si: float) -> np.ndarray:
    """Enstrophy-dissipating momentum tendency (energy-neutral up to the
    projection residual discussed in the module docstring)."""
    if theta_si == 0.0:
        return np.zeros(mesh.n_edges)
    from .dynamics import potential_vorticity
    q = potential_vorticity(mesh, v, h, f_dual)
    grad_c = casimir_gradient(mesh, q, h)
    return casimir_tendency_from_gradient(mesh, v, h, grad_c, theta_si)


def laplacian(mesh: Mesh, v: np.ndarray) -> np.ndarray:
    """Vector Laplacian on edges: grad_n(div V) + grad_t(curl V).

    Both parts are negative semidefinite under the edge inner product
    (the tangential term via the curl adjointness), so the operator is
    dissipative by construction.
    """
    return ops.grad_n(mesh, ops.div(mesh, v)) + ops.grad_t(mesh, ops.curl(mesh, v))


def biharmonic_tendency(mesh: Mesh, v: np.ndarray, nu_si: float) -> np.ndarray:
    """Fourth-order velocity diffusion: -nu lap(lap(V))."""
    if nu_si == 0.0:
        return np.zeros(mesh.n_edges)
    return -nu_si * laplacian(mesh, laplacian(mesh, v))
