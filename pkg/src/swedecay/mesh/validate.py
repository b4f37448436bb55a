"""Report-style mesh validation against the structural invariants."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import Mesh


@dataclass
class CheckResult:
    name: str
    passed: bool
    worst_residual: float
    worst_entity: int
    detail: str = ""

    def __str__(self):
        status = "PASS" if self.passed else "FAIL"
        s = f"[{status}] {self.name}: worst residual {self.worst_residual:.3e}"
        if self.worst_entity >= 0:
            s += f" (entity {self.worst_entity})"
        if self.detail:
            s += f" -- {self.detail}"
        return s


@dataclass
class MeshReport:
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def __str__(self):
        return "\n".join(str(c) for c in self.checks)


def _check(report, name, residuals, tol, detail=""):
    residuals = np.atleast_1d(np.asarray(residuals, dtype=float))
    worst = int(np.argmax(np.abs(residuals)))
    val = float(np.abs(residuals[worst]))
    report.checks.append(CheckResult(name, val <= tol, val,
                                     worst if residuals.size > 1 else -1, detail))


def validate(mesh: Mesh) -> MeshReport:
    """Check every structural invariant; never raises, returns a report."""
    rep = MeshReport()
    area = mesh.total_area

    if mesh.geometry == "plane":
        expected = mesh.lx * mesh.ly
        tol = 1e-12
    else:
        expected = 4.0 * np.pi * mesh.radius ** 2
        tol = 1e-10
    _check(rep, "total primal area", (area - expected) / expected, tol,
           f"sum {area!r} vs domain {expected!r}")
    _check(rep, "total dual area",
           (np.sum(mesh.dual_area) - expected) / expected, tol)

    # kite partitions
    cell_kite_res = (np.sum(mesh.kites, axis=1) - mesh.cell_area) / mesh.cell_area
    _check(rep, "kites tile each triangle", cell_kite_res, 1e-10)
    dual_sum = np.add.reduceat(mesh.dual_kite, mesh.dual_cell_ptr[:-1])
    _check(rep, "kites tile each dual cell",
           (dual_sum - mesh.dual_area) / np.maximum(mesh.dual_area, 1e-300), 1e-10)

    # dual edge positivity
    min_dual = float(np.min(mesh.dual_len))
    rep.checks.append(CheckResult(
        "|dual edge| > 0", min_dual > 0.0, min_dual,
        int(np.argmin(mesh.dual_len)),
        "circumcenter spacing along each edge"))

    _check(rep, "edge lengths > 0", -np.minimum(np.min(mesh.edge_len), 0.0), 0.0)

    # two distinct cells and distinct dual endpoints per edge
    same_cell = np.sum(mesh.edge_cells[:, 0] == mesh.edge_cells[:, 1])
    _check(rep, "edges join two distinct triangles", float(same_cell), 0.0)
    same_dual = np.sum(mesh.edge_duals[:, 0] == mesh.edge_duals[:, 1])
    _check(rep, "edges join two distinct dual vertices", float(same_dual), 0.0)

    # orientation: tangent = vertical x normal, and the plus endpoint
    # sits on the +tangent side (checked via the ccw sign table)
    if mesh.geometry == "plane":
        tan = np.stack([-mesh.edge_normal[:, 1], mesh.edge_normal[:, 0]], axis=1)
    else:
        khat = mesh.edge_mid / mesh.radius
        tan = np.cross(khat, mesh.edge_normal)
    _check(rep, "tangent = k x normal",
           np.linalg.norm(tan - mesh.edge_tangent, axis=1), 1e-12)

    # the ccw sign stored for curl must match geometry: moving along the
    # normal, the edge midpoint turns counterclockwise around the plus vertex
    worst = 0.0
    worst_e = -1
    for v in range(mesh.n_duals):
        lo, hi = mesh.dual_edge_ptr[v], mesh.dual_edge_ptr[v + 1]
        for idx in range(lo, hi):
            e = mesh.dual_edge[idx]
            sgn = mesh.dual_edge_sign[idx]
            rel = mesh.edge_mid[e] - mesh.vert_pos[v]
            if mesh.geometry == "plane":
                rel[0] -= mesh.lx * np.round(rel[0] / mesh.lx)
                rel[1] -= mesh.ly * np.round(rel[1] / mesh.ly)
                cross = rel[0] * mesh.edge_normal[e, 1] - rel[1] * mesh.edge_normal[e, 0]
            else:
                cross = float(np.dot(np.cross(rel, mesh.edge_normal[e]),
                                     mesh.dual_vertical[v]))
            if cross * sgn <= 0.0:
                res = abs(cross)
                if res >= worst:
                    worst, worst_e = res, int(e)
    rep.checks.append(CheckResult("ccw orientation around dual vertices",
                                  worst_e < 0, worst, worst_e))

    # Euler characteristic: V - E + F = 0 (torus) or 2 (sphere)
    chi = mesh.n_duals - mesh.n_edges + mesh.n_cells
    want = 2 if mesh.geometry == "sphere" else 0
    _check(rep, "Euler characteristic", float(chi - want), 0.0,
           f"V-E+F = {chi}, expected {want}")

    # companion tables: each companion edge shares the stated dual vertex
    dv = mesh.edge_duals[:, [0, 0, 1, 1]]
    comp_duals = mesh.edge_duals[mesh.comp_edge]       # (ne,4,2)
    touches = np.any(comp_duals == dv[:, :, None], axis=2)
    _check(rep, "companion edges touch the right dual vertex",
           float(np.sum(~touches)), 0.0)

    return rep
