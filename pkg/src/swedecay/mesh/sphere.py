"""Icosahedral sphere meshes by recursive edge bisection."""

from __future__ import annotations

import numpy as np

from ..errors import MeshError
from .core import Mesh, build_mesh


def _icosahedron():
    """Pole-oriented unit icosahedron: 12 vertices, 20 ccw faces."""
    lat = np.arctan(0.5)
    z = np.sin(lat)
    r = np.cos(lat)
    verts = [np.array([0.0, 0.0, 1.0])]
    for k in range(5):
        lon = 2.0 * np.pi * k / 5.0
        verts.append(np.array([r * np.cos(lon), r * np.sin(lon), z]))
    for k in range(5):
        lon = 2.0 * np.pi * (k + 0.5) / 5.0
        verts.append(np.array([r * np.cos(lon), r * np.sin(lon), -z]))
    verts.append(np.array([0.0, 0.0, -1.0]))
    verts = np.asarray(verts)

    faces = []
    for k in range(5):
        kn = (k + 1) % 5
        faces.append((0, 1 + k, 1 + kn))                 # north cap
        faces.append((1 + k, 6 + k, 1 + kn))             # upper belt
        faces.append((1 + kn, 6 + k, 6 + kn))            # lower belt
        faces.append((6 + k, 11, 6 + kn))                # south cap
    faces = np.asarray(faces, dtype=np.int64)

    # orient ccw seen from outside
    p = verts[faces]
    nrm = np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0])
    out = np.einsum("ij,ij->i", nrm, p.mean(axis=1))
    faces[out < 0] = faces[out < 0][:, ::-1]
    return verts, faces


def build_sphere(refinement_level: int, radius: float) -> Mesh:
    """Recursively bisected icosahedral grid: ``20 * 4**level`` triangles."""
    if refinement_level < 0:
        raise MeshError("refinement level must be >= 0")
    if radius <= 0:
        raise MeshError("radius must be positive")

    verts, faces = _icosahedron()
    for _ in range(refinement_level):
        verts, faces = _bisect(verts, faces)

    vert_pos = verts * radius
    tri_pos = vert_pos[faces]
    return build_mesh("sphere", vert_pos, faces, tri_pos, radius=radius)


def _bisect(verts, faces):
    """Split each triangle into four, projecting midpoints onto the sphere."""
    verts = list(verts)
    midpoint_of: dict = {}

    def mid(a, b):
        key = (a, b) if a < b else (b, a)
        m = midpoint_of.get(key)
        if m is None:
            p = verts[a] + verts[b]
            p = p / np.linalg.norm(p)
            m = len(verts)
            verts.append(p)
            midpoint_of[key] = m
        return m

    new_faces = []
    for a, b, c in faces:
        ab = mid(a, b)
        bc = mid(b, c)
        ca = mid(c, a)
        new_faces.extend([(a, ab, ca), (ab, b, bc), (ca, bc, c), (ab, bc, ca)])
    return np.asarray(verts), np.asarray(new_faces, dtype=np.int64)
