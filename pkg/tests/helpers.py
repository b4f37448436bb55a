"""Test utilities: edge-orientation flipping and field samplers."""

import dataclasses

import numpy as np


def flip_edge(mesh, e):
    """Return a mesh copy with edge ``e`` stored in the reversed
    orientation (normal negated, cells/duals swapped, sign tables fixed).

    Operators applied to (flipped mesh, field with entry e negated) must
    reproduce the original results up to the sign of edge e's own output.
    """
    m = {f.name: getattr(mesh, f.name) for f in dataclasses.fields(mesh)}
    for key in ("edge_cells", "edge_duals", "edge_normal", "edge_tangent",
                "cell_edge_sign", "dual_edge_sign", "comp_edge", "comp_sign",
                "comp_cell", "comp_kite"):
        m[key] = m[key].copy()
    m["edge_cells"][e] = m["edge_cells"][e][::-1]
    m["edge_duals"][e] = m["edge_duals"][e][::-1]
    m["edge_normal"][e] = -m["edge_normal"][e]
    m["edge_tangent"][e] = -m["edge_tangent"][e]
    for c in m["edge_cells"][e]:
        for k in range(3):
            if mesh.cell_edges[c, k] == e:
                m["cell_edge_sign"][c, k] *= -1.0
    sel = mesh.dual_edge == e
    m["dual_edge_sign"][sel] *= -1.0
    perm = [3, 2, 1, 0]
    for key in ("comp_edge", "comp_sign", "comp_cell", "comp_kite"):
        m[key][e] = m[key][e][perm]
    m["comp_sign"][mesh.comp_edge == e] *= -1.0
    return dataclasses.replace(mesh, **m)


def constant_field(vec):
    vec = np.asarray(vec, dtype=float)

    def fn(p):
        return np.tile(vec, (len(p), 1))

    return fn
