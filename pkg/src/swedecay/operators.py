"""Mimetic finite-volume operators on the primal/dual staggering.

Fields are plain float arrays indexed by entity id:

* cell field  -- one value per triangle,
* dual field  -- one value per dual cell (primal vertex),
* edge field  -- normal component per edge in the canonical orientation.

``grad_n`` is minus the adjoint of ``div`` and ``grad_t`` is minus the
adjoint of ``curl`` under the inner products below; those identities are
exact rearrangements, not approximations, and tests hold them to
roundoff.  Note ``grad_t`` differences the dual endpoints as
(minus - plus)/|e|, i.e. it approximates minus the tangential
derivative; the adjoint pairing with the counterclockwise curl is what
fixes this sign.

All reductions run in a fixed order (bincount / reduceat style), so
results are bitwise reproducible.
"""

from __future__ import annotations

import numpy as np

from .mesh import Mesh


def grad_n(mesh: Mesh, f_cell: np.ndarray) -> np.ndarray:
    """Normal gradient of a cell field: (F_j - F_i) / |dual edge|."""
    i, j = mesh.edge_cells[:, 0], mesh.edge_cells[:, 1]
    return (f_cell[j] - f_cell[i]) / mesh.dual_len


def grad_t(mesh: Mesh, g_dual: np.ndarray) -> np.ndarray:
    """Tangential gradient of a dual field: (G_minus - G_plus) / |e|."""
    zm, zp = mesh.edge_duals[:, 0], mesh.edge_duals[:, 1]
    return (g_dual[zm] - g_dual[zp]) / mesh.edge_len


def div(mesh: Mesh, v_edge: np.ndarray) -> np.ndarray:
    """Outward flux sum per triangle divided by its area."""
    e = mesh.cell_edges
    flux = mesh.cell_edge_sign * mesh.edge_len[e] * v_edge[e]
    return flux.sum(axis=1) / mesh.cell_area


def curl(mesh: Mesh, v_edge: np.ndarray) -> np.ndarray:
    """Counterclockwise circulation per dual cell divided by its area."""
    vals = mesh.dual_edge_sign * mesh.dual_len[mesh.dual_edge] * v_edge[mesh.dual_edge]
    return np.add.reduceat(vals, mesh.dual_edge_ptr[:-1]) / mesh.dual_area


def edge_average(mesh: Mesh, f_cell: np.ndarray) -> np.ndarray:
    """Arithmetic mean of the two adjacent cell values."""
    return 0.5 * (f_cell[mesh.edge_cells[:, 0]] + f_cell[mesh.edge_cells[:, 1]])


def dual_average(mesh: Mesh, f_cell: np.ndarray) -> np.ndarray:
    """Kite-area-weighted mean of the triangles around each dual cell."""
    vals = mesh.dual_kite * f_cell[mesh.dual_cell]
    return np.add.reduceat(vals, mesh.dual_cell_ptr[:-1]) / mesh.dual_area


def reconstruct_cell(mesh: Mesh, v_edge: np.ndarray) -> np.ndarray:
    """Perot vector reconstruction at triangle circumcenters.

    u_i = (1/area) sum_k |e_k| (x_edge - x_center) V_k with V_k outward.
    Exact for uniform plane fields; on the sphere the result is projected
    into the tangent plane at the circumcenter.
    """
    vout = mesh.cell_edge_sign * v_edge[mesh.cell_edges]          # (nc,3)
    u = np.einsum("ck,ckd->cd", vout, mesh.cell_edge_vec) / mesh.cell_area[:, None]
    if mesh.geometry == "sphere":
        rhat = mesh.cell_center / mesh.radius
        u -= rhat * np.einsum("cd,cd->c", u, rhat)[:, None]
    return u


def reconstruct_dual(mesh: Mesh, u_cell: np.ndarray) -> np.ndarray:
    """Kite-weighted average of cell vectors onto dual cells."""
    vals = mesh.dual_kite[:, None] * u_cell[mesh.dual_cell]
    out = np.add.reduceat(vals, mesh.dual_cell_ptr[:-1], axis=0) / mesh.dual_area[:, None]
    if mesh.geometry == "sphere":
        out -= mesh.dual_vertical * np.einsum("vd,vd->v", out, mesh.dual_vertical)[:, None]
    return out


def flat(mesh: Mesh, v_edge: np.ndarray) -> np.ndarray:
    """One-form edge values of a normal-velocity field: -|dual edge| V."""
    return -mesh.dual_len * v_edge


def ip_edge(mesh: Mesh, a: np.ndarray, b: np.ndarray) -> float:
    """Edge inner product with |e||dual e| weights."""
    return float(np.sum(mesh.edge_len * mesh.dual_len * a * b))


def ip_cell(mesh: Mesh, f: np.ndarray, g: np.ndarray) -> float:
    """Cell inner product with triangle-area weights."""
    return float(np.sum(mesh.cell_area * f * g))


def ip_dual(mesh: Mesh, p: np.ndarray, q: np.ndarray) -> float:
    """Dual-cell inner product with dual-area weights."""
    return float(np.sum(mesh.dual_area * p * q))


def normal_component(mesh: Mesh, vector_fn) -> np.ndarray:
    """Sample a vector field at edge midpoints and project on the normals.

    ``vector_fn`` maps an (ne, dim) position array to (ne, dim) vectors.
    """
    vec = np.asarray(vector_fn(mesh.edge_mid), dtype=float)
    return np.einsum("ed,ed->e", vec, mesh.edge_normal)


def oriented_value(mesh: Mesh, v_edge: np.ndarray, cell: int, edge: int) -> float:
    """Edge value read outward from ``cell`` (the antisymmetry accessor)."""
    if mesh.edge_cells[edge, 0] == cell:
        return float(v_edge[edge])
    if mesh.edge_cells[edge, 1] == cell:
        return float(-v_edge[edge])
    raise ValueError(f"cell {cell} not adjacent to edge {edge}")
