"""Doubly periodic plane meshes: regular lattice and graded Delaunay."""

from __future__ import annotations

import numpy as np
from scipy.spatial import Delaunay

from ..errors import MeshError
from .core import Mesh, build_mesh


def build_plane_regular(nx: int, ny: int, lx: float, ly: float) -> Mesh:
    """Uniform triangulation of the periodic rectangle.

    ``2*nx*ny`` congruent triangles on an ``nx x ny`` lattice with
    alternating row offsets; with ``ly/lx = sqrt(3)/2 * ny/nx`` all
    triangles are equilateral.  ``ny`` must be even so the row-offset
    pattern closes periodically.
    """
    if nx < 2 or ny < 2:
        raise MeshError("need nx, ny >= 2")
    if ny % 2 != 0:
        raise MeshError("need even ny for a periodic offset-row lattice")
    if lx <= 0 or ly <= 0:
        raise MeshError("need positive domain lengths")
    dx = lx / nx
    dy = ly / ny
    if dy <= dx / 2:
        raise MeshError("aspect ratio gives obtuse triangles with an invalid dual "
                        f"(need ly/ny > lx/(2*nx), got dy={dy}, dx={dx})")

    pp, qq = np.meshgrid(np.arange(nx), np.arange(ny), indexing="ij")
    xv = pp * dx + (qq % 2) * (dx / 2)
    yv = qq * dy
    vert_pos = np.stack([np.mod(xv.ravel(order="F"), lx), yv.ravel(order="F")], axis=1)

    def vid(p, q):
        return (q % ny) * nx + (p % nx)

    def vpos(p, q):
        # unwrapped lattice coordinates (q may exceed ny, p may exceed nx)
        return np.array([p * dx + (q % 2) * (dx / 2), q * dy])

    tri_verts = np.empty((2 * nx * ny, 3), dtype=np.int64)
    tri_pos = np.empty((2 * nx * ny, 3, 2))
    t = 0
    for q in range(ny):
        for p in range(nx):
            if q % 2 == 0:
                up = ((p, q), (p + 1, q), (p, q + 1))
                dn = ((p + 1, q), (p + 1, q + 1), (p, q + 1))
            else:
                up = ((p, q), (p + 1, q), (p + 1, q + 1))
                dn = ((p, q), (p + 1, q + 1), (p, q + 1))
            for tri in (up, dn):
                tri_verts[t] = [vid(*c) for c in tri]
                tri_pos[t] = [vpos(*c) for c in tri]
                t += 1

    return build_mesh("plane", vert_pos, tri_verts, tri_pos, lx=lx, ly=ly)


def build_plane_irregular(nx: int, ny: int, lx: float, ly: float,
                          refinement_center: tuple[float, float] | None = None,
                          refinement_factor: float = 1.0,
                          seed: int = 0,
                          warp: float = 0.08,
                          jitter: float = 0.0) -> Mesh:
    """Delaunay mesh of a smoothly distorted lattice with a central
    refinement disk.

    The lattice is pushed through a seeded smooth periodic deformation
    (a few low-wavenumber Fourier modes, relative amplitude ``warp``) and
    a smooth radial contraction that raises point density by
    ``refinement_factor`` inside a disk of radius ``0.2*min(lx, ly)``
    around ``refinement_center``.  Because the distortion is a fixed
    diffeomorphism, refined meshes form a smooth family and the discrete
    operators keep their convergence order on them.  ``jitter`` adds
    white point noise (in units of the lattice spacing) on top; it
    defaults to off since it destroys consistency under refinement.
    Deterministic for a fixed seed.
    """
    if nx < 2 or ny < 2:
        raise MeshError("need nx, ny >= 2")
    if refinement_factor < 1.0:
        raise MeshError("refinement_factor must be >= 1")
    if refinement_center is None:
        refinement_center = (0.5 * lx, 0.5 * ly)
    rng = np.random.default_rng(seed)
    dx = lx / nx
    dy = ly / ny
    center = np.asarray(refinement_center, dtype=float)

    pp, qq = np.meshgrid(np.arange(nx), np.arange(ny), indexing="ij")
    pts = np.stack([(pp * dx + (qq % 2) * (dx / 2)).ravel(),
                    (qq * dy).ravel()], axis=1)

    # seeded smooth periodic warp; amplitudes scaled so the map stays a
    # diffeomorphism (max displacement gradient well below 1)
    n_modes = 3
    amps = rng.uniform(-1.0, 1.0, (n_modes, 2))
    ks = rng.integers(1, 3, (n_modes, 2))
    phases = rng.uniform(0.0, 2.0 * np.pi, (n_modes, 2))
    if warp > 0.0:
        disp = np.zeros_like(pts)
        for m in range(n_modes):
            arg = (2.0 * np.pi * ks[m, 0] * pts[:, 0] / lx + phases[m, 0])
            brg = (2.0 * np.pi * ks[m, 1] * pts[:, 1] / ly + phases[m, 1])
            disp[:, 0] += amps[m, 0] * np.sin(arg) * np.cos(brg)
            disp[:, 1] += amps[m, 1] * np.cos(arg) * np.sin(brg)
        disp *= warp * min(lx, ly) / n_modes
        pts = pts + disp

    if refinement_factor > 1.0:
        # radial contraction r -> r g(r): g ramps from 1/sqrt(factor) at
        # the center to 1 at the support radius (smoothstep), raising the
        # point density by ~factor inside the disk
        rc = 0.2 * min(lx, ly)
        support = 2.0 * rc
        d = pts - center
        d[:, 0] -= lx * np.round(d[:, 0] / lx)
        d[:, 1] -= ly * np.round(d[:, 1] / ly)
        r = np.hypot(d[:, 0], d[:, 1])
        s = np.clip(r / support, 0.0, 1.0)
        smooth = s * s * (3.0 - 2.0 * s)
        g = 1.0 / np.sqrt(refinement_factor) \
            + (1.0 - 1.0 / np.sqrt(refinement_factor)) * smooth
        pts = pts + d * (g - 1.0)[:, None]

    if jitter > 0.0:
        pts = pts + rng.uniform(-1.0, 1.0, pts.shape) * jitter \
            * np.array([dx, dy])

    pts[:, 0] = np.mod(pts[:, 0], lx)
    pts[:, 1] = np.mod(pts[:, 1], ly)
    return delaunay_periodic(pts, lx, ly)


def delaunay_periodic(points: np.ndarray, lx: float, ly: float) -> Mesh:
    """Periodic Delaunay triangulation via a 3x3 tiling of the point set."""
    n = points.shape[0]
    if n < 3:
        raise MeshError("need at least three points")
    offsets = [(sx, sy) for sy in (-1, 0, 1) for sx in (-1, 0, 1)]
    tiles = [points + np.array([sx * lx, sy * ly]) for sx, sy in offsets]
    allpts = np.concatenate(tiles, axis=0)
    tri = Delaunay(allpts)

    # keep triangles whose centroid falls in the fundamental cell; this
    # picks each periodic triangle exactly once for a valid triangulation
    simp = tri.simplices
    cent = allpts[simp].mean(axis=1)
    inside = ((cent[:, 0] >= 0.0) & (cent[:, 0] < lx)
              & (cent[:, 1] >= 0.0) & (cent[:, 1] < ly))
    simp = simp[inside]
    if simp.shape[0] != 2 * n:
        raise MeshError(f"periodic Delaunay selected {simp.shape[0]} triangles, "
                        f"expected {2 * n}; point set too degenerate")

    tri_pos = allpts[simp]
    tri_verts = simp % n
    # enforce ccw
    d1 = tri_pos[:, 1] - tri_pos[:, 0]
    d2 = tri_pos[:, 2] - tri_pos[:, 0]
    cw = (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]) < 0
    tri_verts[cw] = tri_verts[cw][:, ::-1]
    tri_pos[cw] = tri_pos[cw][:, ::-1]

    return build_mesh("plane", points, tri_verts, tri_pos, lx=lx, ly=ly)
