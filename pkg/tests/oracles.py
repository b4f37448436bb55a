"""Independent, loop-based reference implementations.

Everything here is written straight from the defining formulas with
plain Python loops and its own connectivity lookups (no reliance on the
package's precomputed operator tables), so a table bug cannot cancel in
both paths.
"""

import numpy as np

from swedecay import operators as ops


def outward(mesh, v, cell, edge):
    return v[edge] if mesh.edge_cells[edge, 0] == cell else -v[edge]


def cell_edges_of(mesh, cell):
    return [int(e) for e in mesh.cell_edges[cell]]


def div_oracle(mesh, v):
    out = np.zeros(mesh.n_cells)
    for c in range(mesh.n_cells):
        acc = 0.0
        for e in cell_edges_of(mesh, c):
            acc += mesh.edge_len[e] * outward(mesh, v, c, e)
        out[c] = acc / mesh.cell_area[c]
    return out


def curl_oracle(mesh, v):
    """Circulation per dual cell with the ccw sign recomputed from raw
    geometry (midpoint position against the normal direction)."""
    out = np.zeros(mesh.n_duals)
    for z in range(mesh.n_duals):
        acc = 0.0
        for e in range(mesh.n_edges):
            if mesh.edge_duals[e, 0] != z and mesh.edge_duals[e, 1] != z:
                continue
            rel = mesh.edge_mid[e] - mesh.vert_pos[z]
            if mesh.geometry == "plane":
                rel = rel.copy()
                rel[0] -= mesh.lx * np.round(rel[0] / mesh.lx)
                rel[1] -= mesh.ly * np.round(rel[1] / mesh.ly)
                cross = rel[0] * mesh.edge_normal[e, 1] - rel[1] * mesh.edge_normal[e, 0]
            else:
                cross = np.dot(np.cross(rel, mesh.edge_normal[e]),
                               mesh.dual_vertical[z])
            sgn = 1.0 if cross > 0 else -1.0
            acc += sgn * mesh.dual_len[e] * v[e]
        out[z] = acc / mesh.dual_area[z]
    return out


def edge_average_oracle(mesh, h):
    return np.array([0.5 * (h[mesh.edge_cells[e, 0]] + h[mesh.edge_cells[e, 1]])
                     for e in range(mesh.n_edges)])


def companion(mesh, edge, cell, dual):
    """The other edge of ``cell`` touching ``dual``, found by scanning."""
    for e in cell_edges_of(mesh, cell):
        if e == edge:
            continue
        if mesh.edge_duals[e, 0] == dual or mesh.edge_duals[e, 1] == dual:
            return e
    raise AssertionError("companion edge not found")


def other_cell(mesh, edge, cell):
    i, j = mesh.edge_cells[edge]
    return int(j if i == cell else i)


def kite_of(mesh, cell, dual):
    for k in range(3):
        if mesh.tri_verts[cell, k] == dual:
            return mesh.kites[cell, k]
    raise AssertionError("dual vertex not a corner of cell")


def adv_oracle(mesh, v, h, f_dual):
    """Vorticity/Coriolis transport, transcribed term by term."""
    curlv = curl_oracle(mesh, v)
    out = np.zeros(mesh.n_edges)
    for e in range(mesh.n_edges):
        i, j = (int(c) for c in mesh.edge_cells[e])
        zm, zp = (int(z) for z in mesh.edge_duals[e])
        hbar = 0.5 * (h[i] + h[j])
        val = 0.0
        for z, sgn in ((zm, +1.0), (zp, -1.0)):
            e_ii = companion(mesh, e, i, z)
            e_jj = companion(mesh, e, j, z)
            i_o = other_cell(mesh, e_ii, i)
            j_o = other_cell(mesh, e_jj, j)
            bracket = (kite_of(mesh, i, z) / (2 * mesh.cell_area[i])
                       * 0.5 * (h[j] + h[i_o]) * mesh.edge_len[e_ii]
                       * outward(mesh, v, i, e_ii)
                       + kite_of(mesh, j, z) / (2 * mesh.cell_area[j])
                       * 0.5 * (h[i] + h[j_o]) * mesh.edge_len[e_jj]
                       * outward(mesh, v, j, e_jj))
            val += sgn * (curlv[z] + f_dual[z]) * bracket
        out[e] = val / (hbar * mesh.dual_len[e])
    return out


def kinetic_oracle(mesh, v):
    f = np.zeros(mesh.n_cells)
    for c in range(mesh.n_cells):
        for e in cell_edges_of(mesh, c):
            f[c] += mesh.dual_len[e] * mesh.edge_len[e] * v[e] ** 2
        f[c] /= 2.0 * mesh.cell_area[c]
    out = np.zeros(mesh.n_edges)
    for e in range(mesh.n_edges):
        i, j = mesh.edge_cells[e]
        out[e] = 0.5 * (f[j] - f[i]) / mesh.dual_len[e]
    return out


def lie_oracle(mesh, v, h, w):
    """Projected Lie derivative, literal four-summand transcription."""
    curlw = curl_oracle(mesh, w)
    divv_h = div_oracle(mesh, v * edge_average_oracle(mesh, h))
    s = np.zeros(mesh.n_cells)
    for c in range(mesh.n_cells):
        for e in cell_edges_of(mesh, c):
            s[c] += mesh.edge_len[e] * mesh.dual_len[e] * v[e] * w[e]
        s[c] /= mesh.cell_area[c]
    out = np.zeros(mesh.n_edges)
    for e in range(mesh.n_edges):
        i, j = (int(c) for c in mesh.edge_cells[e])
        zm, zp = (int(z) for z in mesh.edge_duals[e])
        hbar = 0.5 * (h[i] + h[j])
        val = 0.0
        for z, sgn in ((zm, +1.0), (zp, -1.0)):
            e_ii = companion(mesh, e, i, z)
            e_jj = companion(mesh, e, j, z)
            i_o = other_cell(mesh, e_ii, i)
            j_o = other_cell(mesh, e_jj, j)
            bracket = (kite_of(mesh, i, z) / (2 * mesh.cell_area[i])
                       * 0.5 * (h[j] + h[i_o]) * mesh.edge_len[e_ii]
                       * outward(mesh, v, i, e_ii)
                       + kite_of(mesh, j, z) / (2 * mesh.cell_area[j])
                       * 0.5 * (h[i] + h[j_o]) * mesh.edge_len[e_jj]
                       * outward(mesh, v, j, e_jj))
            val += sgn * curlw[z] * bracket
        val += hbar * (s[i] - s[j])
        val += 0.5 * (divv_h[i] + divv_h[j]) * 2.0 * mesh.dual_len[e] * w[e]
        out[e] = val
    return out


def commutator_oracle(mesh, u, v):
    du = edge_average_oracle(mesh, div_oracle(mesh, u))
    dv = edge_average_oracle(mesh, div_oracle(mesh, v))
    u_cell = perot_oracle(mesh, u)
    v_cell = perot_oracle(mesh, v)
    uz = dual_vector_oracle(mesh, u_cell)
    vz = dual_vector_oracle(mesh, v_cell)
    if mesh.dim == 2:
        cross = uz[:, 0] * vz[:, 1] - uz[:, 1] * vz[:, 0]
    else:
        cross = np.einsum("vd,vd->v", np.cross(uz, vz), mesh.dual_vertical)
    gradt = np.array([(cross[mesh.edge_duals[e, 0]] - cross[mesh.edge_duals[e, 1]])
                      / mesh.edge_len[e] for e in range(mesh.n_edges)])
    return u * dv - v * du + gradt


def perot_oracle(mesh, v):
    out = np.zeros((mesh.n_cells, mesh.dim))
    for c in range(mesh.n_cells):
        acc = np.zeros(mesh.dim)
        for k, e in enumerate(cell_edges_of(mesh, c)):
            acc += mesh.cell_edge_vec[c, k] * outward(mesh, v, c, e)
        out[c] = acc / mesh.cell_area[c]
        if mesh.geometry == "sphere":
            rhat = mesh.cell_center[c] / mesh.radius
            out[c] -= rhat * np.dot(out[c], rhat)
    return out


def dual_vector_oracle(mesh, u_cell):
    out = np.zeros((mesh.n_duals, mesh.dim))
    for z in range(mesh.n_duals):
        lo, hi = mesh.dual_cell_ptr[z], mesh.dual_cell_ptr[z + 1]
        acc = np.zeros(mesh.dim)
        for idx in range(lo, hi):
            acc += mesh.dual_kite[idx] * u_cell[mesh.dual_cell[idx]]
        out[z] = acc / mesh.dual_area[z]
        if mesh.geometry == "sphere":
            out[z] -= mesh.dual_vertical[z] * np.dot(out[z], mesh.dual_vertical[z])
    return out


def casimir_gradient_matrix_oracle(mesh, q, h):
    """Matrix-form functional derivative mapped to its edge representative:
    (q_plus - q_minus)/(area_i hbar) times -2 area_i / |e|."""
    out = np.zeros(mesh.n_edges)
    for e in range(mesh.n_edges):
        i, j = mesh.edge_cells[e]
        hbar = 0.5 * (h[i] + h[j])
        m_entry = (q[mesh.edge_duals[e, 1]] - q[mesh.edge_duals[e, 0]]) \
            / (mesh.cell_area[i] * hbar)
        out[e] = -(2.0 * mesh.cell_area[i] / mesh.edge_len[e]) * m_entry
    return out


def lagrangian_oracle(mesh, v, h, g, eta_b):
    """Discrete Lagrangian evaluated from the velocity-matrix entries
    (rotation potential omitted; it cancels in the energy pairing)."""
    kin = 0.0
    for e in range(mesh.n_edges):
        i, j = mesh.edge_cells[e]
        for c in (i, j):
            a_ij = -(mesh.edge_len[e] / (2 * mesh.cell_area[c])) \
                * outward(mesh, v, c, e)
            a_flat = 2 * mesh.cell_area[c] * (mesh.dual_len[e] / mesh.edge_len[e]) \
                * a_ij
            kin += 0.5 * h[c] * a_flat * a_ij * mesh.cell_area[c]
    pot = 0.5 * g * np.sum((h + eta_b) ** 2 * mesh.cell_area)
    return kin - pot


def energy_pairing_oracle(mesh, v, h, g, eta_b):
    """<dl/dA, A>_1 - l(A, h), the Legendre-transform total energy."""
    pairing = 0.0
    for e in range(mesh.n_edges):
        i, j = mesh.edge_cells[e]
        for c in (i, j):
            a_ij = -(mesh.edge_len[e] / (2 * mesh.cell_area[c])) \
                * outward(mesh, v, c, e)
            a_flat = 2 * mesh.cell_area[c] * (mesh.dual_len[e] / mesh.edge_len[e]) \
                * a_ij
            pairing += mesh.cell_area[c] * h[c] * a_flat * a_ij
    return pairing - lagrangian_oracle(mesh, v, h, g, eta_b)


def enstrophy_oracle(mesh, v, h, f_dual):
    curlv = curl_oracle(mesh, v)
    total = 0.0
    for z in range(mesh.n_duals):
        lo, hi = mesh.dual_cell_ptr[z], mesh.dual_cell_ptr[z + 1]
        hz = sum(mesh.dual_kite[idx] * h[mesh.dual_cell[idx]]
                 for idx in range(lo, hi)) / mesh.dual_area[z]
        q = (curlv[z] + f_dual[z]) / hz
        total += 0.5 * hz * q ** 2 * mesh.dual_area[z]
    return total


def generator_oracle(mesh, v):
    """Dense depth-advection generator built entry by entry."""
    n = mesh.n_cells
    b = np.zeros((n, n))
    for e in range(mesh.n_edges):
        i, j = (int(c) for c in mesh.edge_cells[e])
        b[i, j] = -mesh.edge_len[e] / (2 * mesh.cell_area[i]) * outward(mesh, v, i, e)
        b[j, i] = -mesh.edge_len[e] / (2 * mesh.cell_area[j]) * outward(mesh, v, j, e)
    for c in range(n):
        acc = 0.0
        for e in cell_edges_of(mesh, c):
            acc += mesh.edge_len[e] * outward(mesh, v, c, e)
        b[c, c] = -acc / (2 * mesh.cell_area[c])
    return b
