"""Primal triangle / circumcenter-dual mesh container and table assembly.

The mesh is a flat struct-of-arrays over three entity classes:

* cells  -- primal triangles, carrying areas and circumcenters,
* edges  -- unordered primal edges stored in a canonical orientation,
* duals  -- dual (Voronoi) cells, one per primal vertex.

Orientation conventions, fixed here and relied on everywhere else:

* ``edge_normal`` points from ``edge_cells[:, 0]`` to ``edge_cells[:, 1]``
  and is parallel to the dual edge (circumcenter to circumcenter).
* ``edge_tangent = k x n`` (right-handed with the local vertical k).
* ``edge_duals[:, 1]`` ("plus" vertex) is the edge endpoint on the
  ``+tangent`` side of the midpoint; ``edge_duals[:, 0]`` is the other one.
  Consequently the canonical edge direction runs counterclockwise around
  the plus vertex and clockwise around the minus vertex.

An edge-indexed scalar ("edge field") holds the normal component of a
vector quantity in the canonical orientation; reading it against the
orientation flips its sign.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from ..errors import MeshError

# Columns of the per-edge companion tables.  For edge (i, j) with dual
# endpoints (minus, plus): slot 0 = the other edge of T_i at the minus
# vertex, 1 = other edge of T_j at minus, 2 = other edge of T_i at plus,
# 3 = other edge of T_j at plus.
COMP_II_MINUS, COMP_JJ_MINUS, COMP_II_PLUS, COMP_JJ_PLUS = 0, 1, 2, 3


@dataclass(frozen=True)
class Mesh:
    """Immutable primal/dual mesh with precomputed operator tables.

    Positions are 2-vectors on the doubly periodic plane and 3-vectors on
    the sphere.  All areas and lengths are in the units of the input
    geometry (meters for physical runs).
    """

    geometry: str                    # "plane" | "sphere"
    lx: float | None
    ly: float | None
    radius: float | None

    # primal vertices (= dual cell centers)
    vert_pos: np.ndarray             # (nv, dim) wrapped / on-sphere

    # cells
    tri_verts: np.ndarray            # (nc, 3) int, ccw
    cell_area: np.ndarray            # (nc,)
    cell_center: np.ndarray          # (nc, dim) circumcenter, wrapped
    cell_edges: np.ndarray           # (nc, 3) int; slot k spans corners (k+1, k+2)
    cell_edge_sign: np.ndarray       # (nc, 3) +1 where the cell is edge_cells[:,0]
    cell_edge_vec: np.ndarray        # (nc, 3, dim) |e|*(midpoint - circumcenter), unwrapped

    # edges
    edge_cells: np.ndarray           # (ne, 2) int (i, j)
    edge_duals: np.ndarray           # (ne, 2) int (minus, plus)
    edge_len: np.ndarray             # (ne,) |e|
    dual_len: np.ndarray             # (ne,) |e~| > 0
    edge_normal: np.ndarray          # (ne, dim)
    edge_tangent: np.ndarray         # (ne, dim)
    edge_mid: np.ndarray             # (ne, dim) wrapped / on-sphere

    # per-edge companion tables (see column constants above)
    comp_edge: np.ndarray            # (ne, 4) int
    comp_sign: np.ndarray            # (ne, 4) outward orientation factor
    comp_cell: np.ndarray            # (ne, 4) int: i-, j-, i+, j+
    comp_kite: np.ndarray            # (ne, 4): |z-^T_i|, |z-^T_j|, |z+^T_i|, |z+^T_j|

    # dual cells
    dual_area: np.ndarray            # (nd,)
    dual_vertical: np.ndarray        # (nd, 3) local vertical (z-hat / radial)
    dual_cell_ptr: np.ndarray        # (nd+1,) CSR over incident (triangle, kite)
    dual_cell: np.ndarray            # int, ccw-ordered incident triangles
    dual_kite: np.ndarray            # kite areas aligned with dual_cell
    dual_edge_ptr: np.ndarray        # (nd+1,) CSR over incident edges
    dual_edge: np.ndarray            # int
    dual_edge_sign: np.ndarray       # +1 where canonical direction is ccw around the vertex

    kites: np.ndarray = field(repr=False, default=None)  # (nc, 3) kite at each corner

    @property
    def n_cells(self) -> int:
        return self.cell_area.shape[0]

    @property
    def n_edges(self) -> int:
        return self.edge_len.shape[0]

    @property
    def n_duals(self) -> int:
        return self.dual_area.shape[0]

    @property
    def dim(self) -> int:
        return self.vert_pos.shape[1]

    @property
    def total_area(self) -> float:
        return float(np.sum(self.cell_area))

    def hash(self) -> str:
        """SHA-256 over geometry and connectivity, for checkpoints/manifests."""
        h = hashlib.sha256()
        h.update(self.geometry.encode())
        for arr in (self.vert_pos, self.tri_verts, self.cell_area,
                    self.edge_cells, self.edge_len, self.dual_len):
            h.update(np.ascontiguousarray(arr).tobytes())
        return h.hexdigest()


def _circumcenter_plane(p0, p1, p2):
    """Circumcenters of 2D triangles given per-triangle vertex coordinates."""
    d1 = p1 - p0
    d2 = p2 - p0
    s1 = np.sum(d1 * d1, axis=1)
    s2 = np.sum(d2 * d2, axis=1)
    det = 2.0 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])
    if np.any(np.abs(det) <= 0.0):
        bad = int(np.argmin(np.abs(det)))
        raise MeshError(f"degenerate triangle {bad}: zero orientation determinant")
    ux = (d2[:, 1] * s1 - d1[:, 1] * s2) / det
    uy = (d1[:, 0] * s2 - d2[:, 0] * s1) / det
    return p0 + np.stack([ux, uy], axis=1)


def _tri_area_plane(p0, p1, p2):
    d1 = p1 - p0
    d2 = p2 - p0
    return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])


def _quad_area_plane(a, b, c, d):
    """Signed shoelace area of quads given as stacked corner arrays."""
    x = np.stack([a[:, 0], b[:, 0], c[:, 0], d[:, 0]], axis=1)
    y = np.stack([a[:, 1], b[:, 1], c[:, 1], d[:, 1]], axis=1)
    xn = np.roll(x, -1, axis=1)
    yn = np.roll(y, -1, axis=1)
    return 0.5 * np.sum(x * yn - xn * y, axis=1)


def _solid_angle(a, b, c):
    """Signed solid angle of spherical triangles with unit-vector corners.

    van Oosterom & Strackee determinant form; the sign follows the corner
    orientation as seen from outside the sphere, so subdivided pieces add
    up exactly to the whole.
    """
    num = np.einsum("ij,ij->i", a, np.cross(b, c))
    den = (1.0 + np.einsum("ij,ij->i", a, b)
           + np.einsum("ij,ij->i", b, c)
           + np.einsum("ij,ij->i", c, a))
    return 2.0 * np.arctan2(num, den)


def _wrap(pos, lx, ly):
    out = pos.copy()
    out[:, 0] = np.mod(out[:, 0], lx)
    out[:, 1] = np.mod(out[:, 1], ly)
    return out


def build_mesh(geometry, vert_pos, tri_verts, tri_pos, lx=None, ly=None,
               radius=None):
    """Assemble the full table set from raw triangle geometry.

    Parameters
    ----------
    geometry : "plane" or "sphere".
    vert_pos : (nv, dim) canonical vertex positions (wrapped on the plane).
    tri_verts : (nc, 3) vertex indices, counterclockwise.
    tri_pos : (nc, 3, dim) per-triangle vertex coordinates.  On the plane
        these are *unwrapped* copies (each triangle internally consistent);
        periodicity is recovered by integer lattice shifts against
        ``vert_pos``.  On the sphere they equal ``vert_pos[tri_verts]``.
    """
    tri_verts = np.asarray(tri_verts, dtype=np.int64)
    tri_pos = np.asarray(tri_pos, dtype=np.float64)
    vert_pos = np.asarray(vert_pos, dtype=np.float64)
    nc = tri_verts.shape[0]
    on_sphere = geometry == "sphere"

    if np.any(tri_verts[:, 0] == tri_verts[:, 1]) or \
       np.any(tri_verts[:, 1] == tri_verts[:, 2]) or \
       np.any(tri_verts[:, 2] == tri_verts[:, 0]):
        raise MeshError("triangle with repeated vertex")

    p0, p1, p2 = tri_pos[:, 0], tri_pos[:, 1], tri_pos[:, 2]

    if on_sphere:
        nrm = np.cross(p1 - p0, p2 - p0)
        nn = np.linalg.norm(nrm, axis=1, keepdims=True)
        if np.any(nn <= 0.0):
            raise MeshError("degenerate spherical triangle")
        cc = nrm / nn
        flip = np.einsum("ij,ij->i", cc, p0) < 0.0
        cc[flip] *= -1.0
        cell_center = cc * radius
        ph = tri_pos / radius
        cell_area = _solid_angle(ph[:, 0], ph[:, 1], ph[:, 2]) * radius ** 2
        if np.any(cell_area <= 0.0):
            raise MeshError("non-ccw spherical triangle")
        shifts = np.zeros((nc, 3, 2), dtype=np.int64)
    else:
        cell_center = _circumcenter_plane(p0, p1, p2)
        cell_area = _tri_area_plane(p0, p1, p2)
        if np.any(cell_area <= 0.0):
            raise MeshError("non-ccw plane triangle")
        period = np.array([lx, ly])
        base = vert_pos[tri_verts]                          # (nc,3,2)
        shifts = np.rint((tri_pos - base) / period).astype(np.int64)
        if not np.allclose(base + shifts * period, tri_pos, rtol=0.0,
                           atol=1e-6 * max(lx, ly)):
            raise MeshError("triangle coordinates are not lattice shifts of vertex positions")

    # --- edge identification ----------------------------------------------
    # Key = (low vertex, high vertex, lattice shift of the high copy
    # relative to the low copy).  The shift disambiguates multiple edges
    # between the same vertex pair on small tori.
    corner_pairs = ((1, 2), (2, 0), (0, 1))   # edge slot k opposite corner k
    edge_key_to_id: dict = {}
    edge_first: list = []        # (cell, corner_a, corner_b) at creation
    edge_second: list = []       # second adjacent cell
    cell_edges = np.full((nc, 3), -1, dtype=np.int64)
    for t in range(nc):
        tv = tri_verts[t]
        ts = shifts[t]
        for k, (ca, cb) in enumerate(corner_pairs):
            va, vb = int(tv[ca]), int(tv[cb])
            rx = int(ts[cb, 0] - ts[ca, 0])
            ry = int(ts[cb, 1] - ts[ca, 1])
            key = (va, vb, rx, ry) if va <= vb else (vb, va, -rx, -ry)
            eid = edge_key_to_id.get(key)
            if eid is None:
                eid = len(edge_first)
                edge_key_to_id[key] = eid
                edge_first.append((t, ca, cb))
                edge_second.append(-1)
            else:
                if edge_second[eid] != -1:
                    raise MeshError(f"edge {eid} shared by more than two triangles")
                edge_second[eid] = t
            cell_edges[t, k] = eid
    ne = len(edge_first)
    first_cell = np.asarray([f[0] for f in edge_first], dtype=np.int64)
    corner_a = np.asarray([f[1] for f in edge_first], dtype=np.int64)
    corner_b = np.asarray([f[2] for f in edge_first], dtype=np.int64)
    second_cell = np.asarray(edge_second, dtype=np.int64)
    if np.any(second_cell < 0):
        bad = int(np.argmax(second_cell < 0))
        raise MeshError(f"boundary edge {bad}: domain must be closed or periodic")
    edge_cells = np.stack([first_cell, second_cell], axis=1)

    # --- per-edge geometry in the frame of the first adjacent cell ---------
    ar = np.arange(ne)
    pa = tri_pos[first_cell, corner_a]
    pb = tri_pos[first_cell, corner_b]
    va_id = tri_verts[first_cell, corner_a]
    vb_id = tri_verts[first_cell, corner_b]

    # corner indices of va/vb inside the second cell
    match_a = tri_verts[second_cell] == va_id[:, None]
    match_b = tri_verts[second_cell] == vb_id[:, None]
    if not (np.all(np.any(match_a, axis=1)) and np.all(np.any(match_b, axis=1))):
        raise MeshError("inconsistent edge/corner bookkeeping")
    corner_a_j = np.argmax(match_a, axis=1)
    corner_b_j = np.argmax(match_b, axis=1)

    if on_sphere:
        edge_mid = pa + pb
        edge_mid *= radius / np.linalg.norm(edge_mid, axis=1, keepdims=True)
        cosang = np.clip(np.einsum("ij,ij->i", pa, pb) / radius ** 2, -1.0, 1.0)
        edge_len = radius * np.arccos(cosang)
        c_i = cell_center[first_cell]
        c_j = cell_center[second_cell]
        cosd = np.clip(np.einsum("ij,ij->i", c_i, c_j) / radius ** 2, -1.0, 1.0)
        dual_len = radius * np.arccos(cosd)
        if np.any(dual_len <= 0.0):
            bad = int(np.argmin(dual_len))
            raise MeshError(f"edge {bad}: coincident circumcenters (|dual edge| = 0)")
        khat = edge_mid / radius
        chord = c_j - c_i
        chord -= khat * np.einsum("ij,ij->i", khat, chord)[:, None]
        cn = np.linalg.norm(chord, axis=1)
        if np.any(cn <= 0.0):
            bad = int(np.argmin(cn))
            raise MeshError(f"edge {bad}: degenerate dual edge direction")
        edge_normal = chord / cn[:, None]
        edge_tangent = np.cross(khat, edge_normal)
    else:
        # translate T_j's circumcenter into T_i's frame via the lattice
        # shift difference of the shared corner copies
        period = np.array([lx, ly])
        trans = (shifts[first_cell, corner_a] - shifts[second_cell, corner_a_j]) * period
        c_i = cell_center[first_cell]
        c_j = cell_center[second_cell] + trans
        dvec = c_j - c_i
        dual_len = np.linalg.norm(dvec, axis=1)
        if np.any(dual_len <= 0.0):
            bad = int(np.argmin(dual_len))
            raise MeshError(f"edge {bad}: coincident circumcenters (|dual edge| = 0)")
        edge_normal = dvec / dual_len[:, None]
        edge_mid = 0.5 * (pa + pb)
        edge_len = np.linalg.norm(pb - pa, axis=1)
        edge_tangent = np.stack([-edge_normal[:, 1], edge_normal[:, 0]], axis=1)
        ev = (pb - pa) / edge_len[:, None]
        ortho = np.abs(np.einsum("ij,ij->i", ev, edge_normal))
        if np.any(ortho > 1e-6):
            bad = int(np.argmax(ortho))
            raise MeshError(f"edge {bad}: dual edge not orthogonal to primal edge "
                            "(non-Delaunay triangulation)")

    # plus vertex on the +tangent side of the midpoint
    side_a = np.einsum("ij,ij->i", pa - edge_mid, edge_tangent)
    plus_is_a = side_a > 0.0
    edge_duals = np.where(plus_is_a[:, None],
                          np.stack([vb_id, va_id], axis=1),
                          np.stack([va_id, vb_id], axis=1)).astype(np.int64)
    minus_corner_i = np.where(plus_is_a, corner_b, corner_a)
    plus_corner_i = np.where(plus_is_a, corner_a, corner_b)
    minus_corner_j = np.where(plus_is_a, corner_b_j, corner_a_j)
    plus_corner_j = np.where(plus_is_a, corner_a_j, corner_b_j)

    cell_edge_sign = np.where(
        edge_cells[cell_edges, 0] == np.arange(nc)[:, None], 1.0, -1.0)

    # --- kites --------------------------------------------------------------
    # Corner kite = quad [vertex, midpoint of next edge, circumcenter,
    # midpoint of previous edge]; signed so the three kites tile the cell.
    kites = np.empty((nc, 3))
    if on_sphere:
        cch = cell_center / radius
        for k in range(3):
            v = ph[:, k]
            mn = ph[:, k] + ph[:, (k + 1) % 3]
            mn /= np.linalg.norm(mn, axis=1, keepdims=True)
            mp = ph[:, k] + ph[:, (k + 2) % 3]
            mp /= np.linalg.norm(mp, axis=1, keepdims=True)
            kites[:, k] = (_solid_angle(v, mn, cch)
                           + _solid_angle(v, cch, mp)) * radius ** 2
    else:
        for k in range(3):
            v = tri_pos[:, k]
            mn = 0.5 * (tri_pos[:, k] + tri_pos[:, (k + 1) % 3])
            mp = 0.5 * (tri_pos[:, k] + tri_pos[:, (k + 2) % 3])
            kites[:, k] = _quad_area_plane(v, mn, cell_center, mp)

    # --- dual cells -----------------------------------------------------------
    nv = vert_pos.shape[0]
    flat_vert = tri_verts.ravel()
    flat_cell = np.repeat(np.arange(nc, dtype=np.int64), 3)
    flat_kite = kites.ravel()
    rel = cell_center[:, None, :] - tri_pos      # circumcenter seen from each corner
    if on_sphere:
        k0 = vert_pos / radius
        ref = np.where(np.abs(k0[:, 2:3]) < 0.9,
                       np.array([0.0, 0.0, 1.0]), np.array([1.0, 0.0, 0.0]))
        e1 = np.cross(ref, k0)
        e1 /= np.linalg.norm(e1, axis=1, keepdims=True)
        e2 = np.cross(k0, e1)
        b1 = e1[flat_vert]
        b2 = e2[flat_vert]
        relf = rel.reshape(-1, 3)
        flat_ang = np.arctan2(np.einsum("ij,ij->i", relf, b2),
                              np.einsum("ij,ij->i", relf, b1))
    else:
        relf = rel.reshape(-1, 2)
        flat_ang = np.arctan2(relf[:, 1], relf[:, 0])
    order = np.lexsort((flat_ang, flat_vert))
    dual_cell = flat_cell[order]
    dual_kite = flat_kite[order]
    deg = np.bincount(flat_vert, minlength=nv)
    if np.any(deg < 3):
        raise MeshError("dual cell with fewer than three incident triangles")
    dual_cell_ptr = np.zeros(nv + 1, dtype=np.int64)
    np.cumsum(deg, out=dual_cell_ptr[1:])
    dual_area = np.add.reduceat(dual_kite, dual_cell_ptr[:-1])

    # incident edges per dual vertex; sign +1 where the vertex is the
    # edge's plus endpoint (canonical direction ccw around it)
    flat_everts = edge_duals.ravel()
    flat_eids = np.repeat(np.arange(ne, dtype=np.int64), 2)
    flat_esign = np.tile(np.array([-1.0, 1.0]), ne)
    eorder = np.lexsort((flat_eids, flat_everts))
    dual_edge = flat_eids[eorder]
    dual_edge_sign = flat_esign[eorder]
    edeg = np.bincount(flat_everts, minlength=nv)
    dual_edge_ptr = np.zeros(nv + 1, dtype=np.int64)
    np.cumsum(edeg, out=dual_edge_ptr[1:])

    if on_sphere:
        dual_vertical = vert_pos / radius
    else:
        dual_vertical = np.tile(np.array([0.0, 0.0, 1.0]), (nv, 1))

    # --- companion tables ------------------------------------------------------
    # The other edge of a cell at a given corner is the slot opposite the
    # *other* endpoint corner of this edge (pure connectivity).
    i_cell = first_cell
    j_cell = second_cell
    comp_edge = np.stack([
        cell_edges[i_cell, plus_corner_i],    # ii-: at minus vertex
        cell_edges[j_cell, plus_corner_j],    # jj-
        cell_edges[i_cell, minus_corner_i],   # ii+
        cell_edges[j_cell, minus_corner_j],   # jj+
    ], axis=1)
    own_cell = np.stack([i_cell, j_cell, i_cell, j_cell], axis=1)
    comp_sign = np.where(edge_cells[comp_edge, 0] == own_cell, 1.0, -1.0)
    comp_cell = np.where(edge_cells[comp_edge, 0] == own_cell,
                         edge_cells[comp_edge, 1], edge_cells[comp_edge, 0])
    comp_kite = np.stack([
        kites[i_cell, minus_corner_i],
        kites[j_cell, minus_corner_j],
        kites[i_cell, plus_corner_i],
        kites[j_cell, plus_corner_j],
    ], axis=1)

    # --- Perot vectors ----------------------------------------------------------
    cell_edge_vec = np.empty((nc, 3, tri_pos.shape[2]))
    for k, (ca, cb) in enumerate(corner_pairs):
        if on_sphere:
            m = tri_pos[:, ca] + tri_pos[:, cb]
            m *= radius / np.linalg.norm(m, axis=1, keepdims=True)
        else:
            m = 0.5 * (tri_pos[:, ca] + tri_pos[:, cb])
        elen = edge_len[cell_edges[:, k]]
        cell_edge_vec[:, k] = elen[:, None] * (m - cell_center)

    if not on_sphere:
        cell_center = _wrap(cell_center, lx, ly)
        edge_mid = _wrap(edge_mid, lx, ly)

    return Mesh(
        geometry=geometry, lx=lx, ly=ly, radius=radius,
        vert_pos=vert_pos, tri_verts=tri_verts,
        cell_area=cell_area, cell_center=cell_center,
        cell_edges=cell_edges, cell_edge_sign=cell_edge_sign,
        cell_edge_vec=cell_edge_vec,
        edge_cells=edge_cells, edge_duals=edge_duals,
        edge_len=edge_len, dual_len=dual_len,
        edge_normal=edge_normal, edge_tangent=edge_tangent, edge_mid=edge_mid,
        comp_edge=comp_edge, comp_sign=comp_sign,
        comp_cell=comp_cell, comp_kite=comp_kite,
        dual_area=dual_area, dual_vertical=dual_vertical,
        dual_cell_ptr=dual_cell_ptr, dual_cell=dual_cell, dual_kite=dual_kite,
        dual_edge_ptr=dual_edge_ptr, dual_edge=dual_edge,
        dual_edge_sign=dual_edge_sign,
        kites=kites,
    )
