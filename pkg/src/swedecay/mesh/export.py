"""CSV export of the mesh entity tables (one file per entity class)."""

from __future__ import annotations

import os

import numpy as np

from .core import Mesh

FMT = "%.17g"


def export_csv(mesh: Mesh, out_dir: str) -> None:
    """Write triangles.csv, edges.csv and duals.csv into ``out_dir``."""
    os.makedirs(out_dir, exist_ok=True)
    dim3 = mesh.dim == 3

    with open(os.path.join(out_dir, "triangles.csv"), "w") as f:
        f.write("id,cx,cy,cz,area\n" if dim3 else "id,cx,cy,area\n")
        for i in range(mesh.n_cells):
            c = mesh.cell_center[i]
            coords = ",".join(FMT % x for x in c)
            f.write(f"{i},{coords},{FMT % mesh.cell_area[i]}\n")

    with open(os.path.join(out_dir, "edges.csv"), "w") as f:
        f.write("id,i,j,len_e,len_de,nx,ny,nz\n" if dim3
                else "id,i,j,len_e,len_de,nx,ny\n")
        for e in range(mesh.n_edges):
            n = mesh.edge_normal[e]
            coords = ",".join(FMT % x for x in n)
            f.write(f"{e},{mesh.edge_cells[e, 0]},{mesh.edge_cells[e, 1]},"
                    f"{FMT % mesh.edge_len[e]},{FMT % mesh.dual_len[e]},{coords}\n")

    with open(os.path.join(out_dir, "duals.csv"), "w") as f:
        f.write("id,area\n")
        for d in range(mesh.n_duals):
            f.write(f"{d},{FMT % mesh.dual_area[d]}\n")
