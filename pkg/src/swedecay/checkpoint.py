"""Binary checkpoint files: versioned header, mesh hash, state arrays.

Layout (little endian): magic ``SWDK``, u32 version, 64-byte hex mesh
hash, u64 step index, f64 time, f64 dt, u64 edge count, u64 cell count,
then V and h as f64 arrays.
"""

from __future__ import annotations

import struct

import numpy as np

from .dynamics import State
from .errors import NumericsError
from .mesh import Mesh

MAGIC = b"SWDK"
VERSION = 1
_HEADER = "<4sI64sQddQQ"


def write_checkpoint(path: str, mesh: Mesh, state: State, step: int,
                     dt: float) -> None:
    header = struct.pack(_HEADER, MAGIC, VERSION, mesh.hash().encode(),
                         step, state.t, dt, mesh.n_edges, mesh.n_cells)
    with open(path, "wb") as f:
        f.write(header)
        f.write(np.ascontiguousarray(state.v, dtype="<f8").tobytes())
        f.write(np.ascontiguousarray(state.h, dtype="<f8").tobytes())


def read_checkpoint(path: str, mesh: Mesh | None = None):
    """Returns (state, step, dt, mesh_hash); verifies the hash if a mesh
    is supplied."""
    with open(path, "rb") as f:
        raw = f.read(struct.calcsize(_HEADER))
        if len(raw) < struct.calcsize(_HEADER):
            raise NumericsError(f"checkpoint {path} is truncated or empty")
        magic, version, mesh_hash, step, t, dt, ne, nc = struct.unpack(_HEADER, raw)
        if magic != MAGIC:
            raise NumericsError(f"{path} is not a checkpoint file")
        if version != VERSION:
            raise NumericsError(f"unsupported checkpoint version {version}")
        v = np.frombuffer(f.read(8 * ne), dtype="<f8").astype(np.float64)
        h = np.frombuffer(f.read(8 * nc), dtype="<f8").astype(np.float64)
    if v.size != ne or h.size != nc:
        raise NumericsError(f"checkpoint {path} is truncated")
    mesh_hash = mesh_hash.decode()
    if mesh is not None:
        if mesh.n_edges != ne or mesh.n_cells != nc or mesh.hash() != mesh_hash:
            raise NumericsError("checkpoint does not match the mesh")
    return State(v, h, t), step, dt, mesh_hash
