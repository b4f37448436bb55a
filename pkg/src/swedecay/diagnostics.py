"""Conserved-quantity functionals, error norms and spectra.

The total energy uses the kinetic weight consistent with the discrete
Lagrangian (quarter |e||e~|V^2 sums per cell); tests pin this against a
duality-pairing oracle.  The potential enstrophy is the dual-cell
functional 1/2 sum h q^2 |dual area|.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import operators as ops
from .dynamics import PhysicalParams, State, dual_depth, kinetic_energy_cell, \
    potential_vorticity
from .mesh import Mesh

FMT = "%.17g"

DIAG_HEADER = ("step,time_s,energy,enstrophy,mass,"
               "energy_rel_err,enstrophy_rel_err,mass_rel_err,fp_iters")


@dataclass
class DiagnosticsRecord:
    step: int
    t: float
    energy: float
    enstrophy: float
    mass: float
    fp_iters: int = 0
    energy_rel_err: float = 0.0
    enstrophy_rel_err: float = 0.0
    mass_rel_err: float = 0.0
    enstrophy_decay_rate: float | None = None


def energy(mesh: Mesh, state: State, params: PhysicalParams) -> float:
    """Total energy: g/2 (h+eta_b)^2 area + h/2 * (cell kinetic density) area."""
    eta = params.topography(mesh)
    pot = 0.5 * params.g * np.sum((state.h + eta) ** 2 * mesh.cell_area)
    kin = 0.5 * np.sum(state.h * kinetic_energy_cell(mesh, state.v)
                       * mesh.cell_area)
    return float(pot + kin)


def enstrophy(mesh: Mesh, state: State, params: PhysicalParams,
              f_dual: np.ndarray) -> float:
    """Potential enstrophy: 1/2 sum h_z q_z^2 |dual area|."""
    q = potential_vorticity(mesh, state.v, state.h, f_dual)
    hz = dual_depth(mesh, state.h)
    return float(0.5 * np.sum(hz * q ** 2 * mesh.dual_area))


def mass(mesh: Mesh, state: State) -> float:
    return float(np.sum(mesh.cell_area * state.h))


def record(mesh: Mesh, state: State, params: PhysicalParams,
           f_dual: np.ndarray, step: int, fp_iters: int = 0) -> DiagnosticsRecord:
    return DiagnosticsRecord(step, state.t,
                             energy(mesh, state, params),
                             enstrophy(mesh, state, params, f_dual),
                             mass(mesh, state), fp_iters)


def relative_error_series(records: list[DiagnosticsRecord]) -> list[DiagnosticsRecord]:
    """Fill the relative-error fields against the first record (in place)."""
    if not records:
        return records
    r0 = records[0]
    prev = None
    for r in records:
        r.energy_rel_err = (r.energy - r0.energy) / r0.energy
        r.enstrophy_rel_err = (r.enstrophy - r0.enstrophy) / r0.enstrophy
        r.mass_rel_err = (r.mass - r0.mass) / r0.mass
        if prev is not None and r.t > prev.t:
            r.enstrophy_decay_rate = (r.enstrophy - prev.enstrophy) / (r.t - prev.t)
        prev = r
    return records


def write_diagnostics_csv(path: str, records: list[DiagnosticsRecord]) -> None:
    relative_error_series(records)
    with open(path, "w") as f:
        f.write(DIAG_HEADER + "\n")
        for r in records:
            f.write(f"{r.step},{FMT % r.t},{FMT % r.energy},{FMT % r.enstrophy},"
                    f"{FMT % r.mass},{FMT % r.energy_rel_err},"
                    f"{FMT % r.enstrophy_rel_err},{FMT % r.mass_rel_err},"
                    f"{r.fp_iters}\n")


def edge_error_norms(mesh: Mesh, numeric: np.ndarray,
                     reference: np.ndarray) -> tuple[float, float]:
    """Relative L2 / Linf errors with half |e||e~| edge-area weights."""
    area = 0.5 * mesh.edge_len * mesh.dual_len
    diff = numeric - reference
    l2 = np.sqrt(np.sum(area * diff ** 2)) / np.sqrt(np.sum(area * reference ** 2))
    linf = np.max(np.abs(diff)) / np.max(np.abs(reference))
    return float(l2), float(linf)


def _resample_plane(mesh: Mesh, points: np.ndarray, values: np.ndarray,
                    grid_n: int) -> np.ndarray:
    """Linear interpolation of scattered periodic data onto a uniform grid."""
    from scipy.interpolate import LinearNDInterpolator
    lx, ly = mesh.lx, mesh.ly
    tiles = []
    vals = []
    for sx in (-1, 0, 1):
        for sy in (-1, 0, 1):
            tiles.append(points + np.array([sx * lx, sy * ly]))
            vals.append(values)
    interp = LinearNDInterpolator(np.concatenate(tiles), np.concatenate(vals))
    gx = (np.arange(grid_n) + 0.5) * lx / grid_n
    gy = (np.arange(grid_n) + 0.5) * ly / grid_n
    xx, yy = np.meshgrid(gx, gy, indexing="ij")
    out = interp(np.stack([xx.ravel(), yy.ravel()], axis=1))
    return out.reshape(grid_n, grid_n)


def spectra(mesh: Mesh, state: State, params: PhysicalParams,
            f_dual: np.ndarray, grid_n: int = 256):
    """Kinetic-energy and enstrophy spectra over radial wavenumber shells.

    Plane only.  Reconstructed cell-center velocity and q*sqrt(h) at dual
    vertices are resampled to a uniform grid and binned by |k| with shell
    width 2*pi/Lx.  Densities are per unit area, so the bin sum of the
    kinetic spectrum equals the resampled-grid mean of |u|^2/2.
    """
    if mesh.geometry != "plane":
        raise ValueError("spectra are defined for plane meshes only")
    u_cell = ops.reconstruct_cell(mesh, state.v)
    ux = _resample_plane(mesh, mesh.cell_center, u_cell[:, 0], grid_n)
    uy = _resample_plane(mesh, mesh.cell_center, u_cell[:, 1], grid_n)
    q = potential_vorticity(mesh, state.v, state.h, f_dual)
    hz = dual_depth(mesh, state.h)
    qs = _resample_plane(mesh, mesh.vert_pos, q * np.sqrt(hz), grid_n)

    n = grid_n
    kx = 2.0 * np.pi * np.fft.fftfreq(n, d=mesh.lx / n)
    ky = 2.0 * np.pi * np.fft.fftfreq(n, d=mesh.ly / n)
    kmag = np.hypot(kx[:, None], ky[None, :])
    dk = 2.0 * np.pi / max(mesh.lx, mesh.ly)
    shell = np.rint(kmag / dk).astype(int)

    def shell_sum(field):
        power = np.abs(np.fft.fft2(field)) ** 2 / field.size ** 2
        return np.bincount(shell.ravel(), weights=power.ravel(),
                           minlength=shell.max() + 1)

    ke = 0.5 * (shell_sum(ux) + shell_sum(uy))
    ens = 0.5 * shell_sum(qs)
    nmax = n // 2
    k = np.arange(1, nmax) * dk
    return k, ke[1:nmax], ens[1:nmax]


def write_spectrum_csv(path: str, k: np.ndarray, ke: np.ndarray,
                       ens: np.ndarray) -> None:
    with open(path, "w") as f:
        f.write("k,ke_density,enstrophy_density\n")
        for ki, kei, ei in zip(k, ke, ens):
            f.write(f"{FMT % ki},{FMT % kei},{FMT % ei}\n")


def fit_loglog_slope(x: np.ndarray, y: np.ndarray) -> float:
    """Least-squares slope of log(y) against log(x)."""
    good = (x > 0) & (y > 0)
    return float(np.polyfit(np.log(x[good]), np.log(y[good]), 1)[0])
