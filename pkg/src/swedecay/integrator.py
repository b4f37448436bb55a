"""Time stepping: rational (Crank-Nicolson type) continuity update and a
fixed-point iteration for the implicit-in-velocity momentum update.

One step advances the depth first, solving
``(I - dt/2 B) h_new = (I + dt/2 B) h_old`` with B the depth-advection
generator assembled from the current velocity, then iterates the
trapezoidal momentum update against the new depth.  The generator's
area-weighted column sums vanish identically, so total mass is invariant
up to the linear-solve residual; the solve runs on the depth increment,
which keeps that residual at roundoff relative to the mass itself.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import operators as ops
from .dissipation import (DissipationConfig, biharmonic_tendency,
                          casimir_gradient, casimir_tendency_from_gradient)
from .dynamics import (PhysicalParams, State, adv_term, check_positive,
                       coriolis_dual, gradient_term, kinetic_term,
                       potential_vorticity)
from .errors import NumericsError
from .mesh import Mesh


@dataclass
class TimeConfig:
    """Step size and solver tolerances.

    ``dt`` of zero or None selects the CFL default
    ``cfl * min|dual edge| / sqrt(g * max(h + eta_b))``.
    """
    dt: float | None = None
    cfl: float = 0.2
    t_end: float = 0.0
    fp_tol: float = 1e-12          # max-norm on velocity increments (m/s)
    fp_max_iters: int = 50
    linear_tol: float = 1e-13
    linear_max_iters: int = 400

    def __post_init__(self):
        if self.dt is not None and self.dt < 0:
            raise ValueError("dt must be positive (or None/0 for CFL default)")
        if self.fp_tol <= 0 or self.fp_max_iters < 1:
            raise ValueError("bad fixed-point settings")

    def resolve_dt(self, mesh: Mesh, params: PhysicalParams,
                   state: State) -> float:
        if self.dt:
            return float(self.dt)
        cmax = np.sqrt(params.g * np.max(state.h + params.topography(mesh)))
        return float(self.cfl * np.min(mesh.dual_len) / cmax)


def assemble_advection_generator(mesh: Mesh, v: np.ndarray) -> sp.csr_matrix:
    """Sparse generator B of the depth evolution dh/dt = B h.

    Row i holds -|e|V(out)/(2 area_i) on each neighbor and minus the same
    flux sum on the diagonal, i.e. B h = -div(V hbar).  Area-weighted
    column sums cancel in pairs (mass neutrality).
    """
    n = mesh.n_cells
    i, j = mesh.edge_cells[:, 0], mesh.edge_cells[:, 1]
    flux = mesh.edge_len * v                       # oriented i -> j
    rows = np.concatenate([i, j, np.arange(n)])
    cols = np.concatenate([j, i, np.arange(n)])
    diag = np.zeros(n)
    np.add.at(diag, i, -flux)
    np.add.at(diag, j, +flux)
    data = np.concatenate([-flux / (2.0 * mesh.cell_area[i]),
                           +flux / (2.0 * mesh.cell_area[j]),
                           diag / (2.0 * mesh.cell_area)])
    return sp.csr_matrix((data, (rows, cols)), shape=(n, n))


def continuity_step(mesh: Mesh, h: np.ndarray, gen: sp.csr_matrix, dt: float,
                    tol: float = 1e-13, max_iters: int = 400):
    """Advance the depth by the rational update; returns (h_new, iterations).

    Solved in increment form: (I - dt/2 B) delta = dt B h, so the
    iteration and its residual act on the (small) increment and total
    mass is preserved to roundoff.  Falls back to a direct sparse solve
    if the stationary iteration stalls (time step far beyond CFL).
    """
    b = dt * (gen @ h)
    bnorm = np.max(np.abs(b))
    if bnorm == 0.0:
        return h.copy(), 0
    half = 0.5 * dt
    delta = b.copy()
    for it in range(1, max_iters + 1):
        new = b + half * (gen @ delta)
        if np.max(np.abs(new - delta)) <= tol * max(bnorm, np.max(np.abs(new))):
            delta = new
            break
        delta = new
    else:
        eye = sp.identity(mesh.n_cells, format="csc")
        mat = (eye - half * gen).tocsc()
        delta = spla.splu(mat).solve(b)
        it = max_iters
    h_new = h + delta
    if not np.all(np.isfinite(h_new)):
        raise NumericsError("continuity update produced non-finite depth")
    return h_new, it


def _tendency(mesh, params, diss, f_dual, v, h, grad_c):
    """Momentum tendency: conservative terms plus the selected dissipation;
    the pressure-gradient part is handled separately by the caller."""
    out = -adv_term(mesh, v, h, f_dual) - kinetic_term(mesh, v)
    if diss.mode == "casimir" and diss.theta_si != 0.0:
        out = out + casimir_tendency_from_gradient(mesh, v, h, grad_c,
                                                   diss.theta_si)
    elif diss.mode == "biharmonic" and diss.nu_si != 0.0:
        out = out + biharmonic_tendency(mesh, v, diss.nu_si)
    return out


def momentum_fixed_point(mesh: Mesh, params: PhysicalParams,
                         diss: DissipationConfig, f_dual: np.ndarray,
                         v_old: np.ndarray, h_old: np.ndarray,
                         h_new: np.ndarray, dt: float,
                         tol: float = 1e-12, max_iters: int = 50):
    """Trapezoidal momentum update solved by fixed-point iteration.

    The enstrophy-gradient field of the selective decay is evaluated once
    from the old state and frozen across the iteration.  Returns
    (v_new, iterations); raises NumericsError if the loop stalls.
    """
    check_positive("old depth", h_old)
    check_positive("new depth", h_new)
    grad_c = None
    if diss.mode == "casimir" and diss.theta_si != 0.0:
        q_old = potential_vorticity(mesh, v_old, h_old, f_dual)
        grad_c = casimir_gradient(mesh, q_old, h_old)

    g_new = gradient_term(mesh, h_new, params.topography(mesh), params.g)
    tend_old = _tendency(mesh, params, diss, f_dual, v_old, h_old, grad_c)
    v = v_old.copy()
    for it in range(1, max_iters + 1):
        tend_cur = _tendency(mesh, params, diss, f_dual, v, h_new, grad_c)
        v_next = v_old + dt * (0.5 * (tend_cur + tend_old) - g_new)
        diff = np.max(np.abs(v_next - v))
        v = v_next
        if diff < tol:
            return v, it
    raise NumericsError(
        f"momentum fixed point did not reach {tol} in {max_iters} iterations "
        f"(last increment {diff!r})")


@dataclass
class StepInfo:
    fp_iters: int
    linear_iters: int


def step(mesh: Mesh, state: State, params: PhysicalParams,
         diss: DissipationConfig, time_cfg: TimeConfig,
         dt: float, f_dual: np.ndarray | None = None):
    """One full time step (depth first, then momentum); returns (state, info).

    Instability surfaces as NumericsError (positivity or fixed-point
    failure), so float overflow warnings on the way there are silenced.
    """
    if f_dual is None:
        f_dual = coriolis_dual(mesh, params)
    with np.errstate(over="ignore", invalid="ignore"):
        gen = assemble_advection_generator(mesh, state.v)
        h_new, lin_iters = continuity_step(mesh, state.h, gen, dt,
                                           tol=time_cfg.linear_tol,
                                           max_iters=time_cfg.linear_max_iters)
        check_positive("updated depth", h_new)
        v_new, fp_iters = momentum_fixed_point(
            mesh, params, diss, f_dual, state.v, state.h, h_new, dt,
            tol=time_cfg.fp_tol, max_iters=time_cfg.fp_max_iters)
    return State(v_new, h_new, state.t + dt), StepInfo(fp_iters, lin_iters)


def run(mesh: Mesh, state: State, params: PhysicalParams,
        diss: DissipationConfig, time_cfg: TimeConfig,
        n_steps: int | None = None, observer=None):
    """March ``n_steps`` (or until ``time_cfg.t_end``); returns the final state.

    ``observer(step_index, state, info)`` is called after every step; the
    initial state is reported as step 0 with ``info=None``.
    """
    f_dual = coriolis_dual(mesh, params)
    dt = time_cfg.resolve_dt(mesh, params, state)
    if n_steps is None:
        n_steps = int(np.ceil(max(time_cfg.t_end - state.t, 0.0) / dt - 1e-12))
    t0 = state.t
    if observer is not None:
        observer(0, state, None)
    for k in range(1, n_steps + 1):
        state, info = step(mesh, state, params, diss, time_cfg, dt,
                           f_dual=f_dual)
        state.t = t0 + k * dt          # keep t an exact multiple of dt
        if observer is not None:
            observer(k, state, info)
    return state
