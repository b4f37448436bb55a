"""Command-line front end.

Subcommands: ``run`` (scenario integration with diagnostics, snapshots
and checkpoints), ``convergence-commutator``, ``convergence-energy``,
``spectra`` and ``export-mesh``.

Exit codes: 0 success, 2 configuration error, 3 numerical failure
(fixed point, linear solve, positivity, bad checkpoint payload),
4 mesh validation failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from . import diagnostics as diag
from . import operators as ops
from .cases import CaseSpec, commutator_test_fields, initialize
from .checkpoint import read_checkpoint, write_checkpoint
from .config import SimConfig, parse_config
from .dissipation import DissipationConfig, discrete_commutator
from .dynamics import coriolis_dual, dual_depth
from .errors import ConfigError, MeshError, NumericsError
from .integrator import TimeConfig, run, step
from .mesh import (build_plane_irregular, build_plane_regular, build_sphere,
                   export_csv, validate)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICS = 3
EXIT_MESH = 4

FMT = "%.17g"


def _apply_threads(args_threads: int | None, deterministic: bool) -> int:
    threads = 1 if deterministic else (args_threads or 1)
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ[var] = str(threads)
    return threads


def _write_manifest(out_dir: str, cfg: SimConfig, config_path: str,
                    mesh_hash: str) -> None:
    manifest = {
        "tool": "swedecay",
        "version": __version__,
        "config_path": os.path.abspath(config_path),
        "mesh_hash": mesh_hash,
        "out_dir": os.path.abspath(out_dir),
        "resolved_config": cfg.as_dict(),
    }
    with open(os.path.join(out_dir, "manifest.json"), "w") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)


def _snapshot(out_dir: str, mesh, state, params, f_dual, step_idx: int) -> None:
    snap = os.path.join(out_dir, "snapshots")
    os.makedirs(snap, exist_ok=True)
    with open(os.path.join(snap, f"step{step_idx:08d}_cells.csv"), "w") as f:
        f.write("id,h\n")
        for c in range(mesh.n_cells):
            f.write(f"{c},{FMT % state.h[c]}\n")
    hz = dual_depth(mesh, state.h)
    q_rel = ops.curl(mesh, state.v) / hz
    with open(os.path.join(snap, f"step{step_idx:08d}_duals.csv"), "w") as f:
        f.write("id,q_rel\n")
        for d in range(mesh.n_duals):
            f.write(f"{d},{FMT % q_rel[d]}\n")


def cmd_run(args) -> int:
    try:
        cfg = parse_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.out:
        cfg.out_dir = args.out
    if args.mode:
        cfg.mode = args.mode
        cfg.dissipation = DissipationConfig(args.mode,
                                            theta=cfg.dissipation.theta,
                                            nu=cfg.dissipation.nu)
    if args.deterministic:
        cfg.deterministic = True
    cfg.threads = _apply_threads(args.threads, cfg.deterministic)

    try:
        mesh = cfg.grid.build()
    except MeshError as exc:
        print(f"mesh construction failed: {exc}", file=sys.stderr)
        return EXIT_MESH
    report = validate(mesh)
    if not report.ok:
        print("mesh validation failed:", file=sys.stderr)
        print(report, file=sys.stderr)
        return EXIT_MESH

    try:
        state, params = initialize(mesh, cfg.case)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    f_dual = coriolis_dual(mesh, params)

    os.makedirs(cfg.out_dir, exist_ok=True)
    _write_manifest(cfg.out_dir, cfg, args.config, mesh.hash())

    dt = cfg.time.resolve_dt(mesh, params, state)
    n_steps = int(np.ceil(max(cfg.time.t_end - state.t, 0.0) / dt - 1e-12))
    records: list = []
    out = cfg.out_dir
    every = max(cfg.output.diag_every_steps, 1)
    snap_every = cfg.output.snapshot_every_steps
    chk_every = cfg.output.checkpoint_every_steps

    def observer(k, st, info):
        if k % every == 0 or k == n_steps:
            records.append(diag.record(mesh, st, params, f_dual, k,
                                       info.fp_iters if info else 0))
        if snap_every and k % snap_every == 0:
            _snapshot(out, mesh, st, params, f_dual, k)
        if chk_every and k and k % chk_every == 0:
            write_checkpoint(os.path.join(out, f"checkpoint_{k:08d}.bin"),
                             mesh, st, k, dt)

    _snapshot(out, mesh, state, params, f_dual, 0)
    try:
        final = run(mesh, state, params, cfg.dissipation, cfg.time,
                    n_steps=n_steps, observer=observer)
    except NumericsError as exc:
        diag.write_diagnostics_csv(os.path.join(out, "diagnostics.csv"), records)
        print(f"numerical failure: {exc}", file=sys.stderr)
        print(f"last good diagnostics kept in {out}/diagnostics.csv",
              file=sys.stderr)
        return EXIT_NUMERICS

    diag.write_diagnostics_csv(os.path.join(out, "diagnostics.csv"), records)
    _snapshot(out, mesh, final, params, f_dual, n_steps)
    write_checkpoint(os.path.join(out, "checkpoint_final.bin"), mesh, final,
                     n_steps, dt)
    print(f"completed {n_steps} steps (dt = {dt:.6g} s) -> {out}")
    return EXIT_OK


def _commutator_study(domain: str, levels: int, seed: int = 0):
    rows = []
    for i in range(levels):
        if domain == "sphere":
            mesh = build_sphere(3 + i, 1.0)
        else:
            n = 32 * 2 ** i
            if domain == "plane":
                mesh = build_plane_regular(n, n, 5000e3, 4330e3)
            else:
                mesh = build_plane_irregular(n, n, 5000e3, 4330e3, seed=seed)
        u, v, ref = commutator_test_fields(mesh)
        w = discrete_commutator(mesh, u, v)
        l2, linf = diag.edge_error_norms(mesh, w, ref)
        rows.append((mesh.n_cells, l2, linf))
    return rows


def cmd_convergence_commutator(args) -> int:
    rows = _commutator_study(args.domain, args.levels, seed=args.seed)
    lines = ["N,L2,Linf"] + [f"{n},{FMT % l2},{FMT % li}" for n, l2, li in rows]
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_convergence_energy(args) -> int:
    if args.case != "vortex":
        print(f"config error: unsupported case {args.case!r}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        dts = [float(x) for x in args.dts.split(",") if x.strip()]
    except ValueError:
        print(f"config error: bad --dts {args.dts!r}", file=sys.stderr)
        return EXIT_CONFIG
    if not dts:
        print("config error: empty --dts", file=sys.stderr)
        return EXIT_CONFIG

    mesh = build_plane_regular(args.nx, args.nx, 5000e3, 4330e3)
    state0, params = initialize(mesh, CaseSpec("vortex_pair"))
    h0 = diag.energy(mesh, state0, params)
    t_end = args.days * 86400.0
    rows = []
    any_ok = False
    for dt in dts:
        tc = TimeConfig(dt=dt)
        n = int(round(t_end / dt))
        try:
            final = run(mesh, state0.copy(), params, DissipationConfig("none"),
                        tc, n_steps=n)
            err = abs(diag.energy(mesh, final, params) - h0) / h0
            any_ok = True
        except NumericsError:
            err = float("nan")
        rows.append((dt, err))
    lines = ["dt_s,energy_rel_err"] + [f"{FMT % dt},{FMT % e}" for dt, e in rows]
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if any_ok else EXIT_NUMERICS


def cmd_spectra(args) -> int:
    manifest_path = args.manifest or os.path.join(
        os.path.dirname(os.path.abspath(args.checkpoint)), "manifest.json")
    try:
        with open(manifest_path) as f:
            manifest = json.load(f)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"config error: cannot read manifest {manifest_path}: {exc}",
              file=sys.stderr)
        return EXIT_CONFIG
    grid = manifest["resolved_config"]["grid"]
    run_sec = manifest["resolved_config"]["run"]
    case_params = manifest["resolved_config"].get("case_params", {})
    if grid["kind"] == "sphere":
        print("config error: spectra are plane-only", file=sys.stderr)
        return EXIT_CONFIG
    if grid["kind"] == "plane_regular":
        mesh = build_plane_regular(grid["nx"], grid["ny"], grid["lx"], grid["ly"])
    else:
        mesh = build_plane_irregular(grid["nx"], grid["ny"], grid["lx"],
                                     grid["ly"],
                                     refinement_factor=grid["refinement_factor"],
                                     seed=grid["seed"], jitter=grid["jitter"])
    try:
        state, _, _, _ = read_checkpoint(args.checkpoint, mesh)
    except NumericsError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    _, params = initialize(mesh, CaseSpec(run_sec["case"], case_params))
    f_dual = coriolis_dual(mesh, params)
    k, ke, ens = diag.spectra(mesh, state, params, f_dual, grid_n=args.grid)
    out = args.out or "spectrum.csv"
    diag.write_spectrum_csv(out, k, ke, ens)
    print(f"wrote {out}")
    return EXIT_OK


def cmd_export_mesh(args) -> int:
    try:
        if args.kind == "sphere":
            mesh = build_sphere(args.level, args.radius)
        elif args.kind == "plane_irregular":
            mesh = build_plane_irregular(args.nx, args.ny, args.lx_km * 1e3,
                                         args.ly_km * 1e3, seed=args.seed)
        else:
            mesh = build_plane_regular(args.nx, args.ny, args.lx_km * 1e3,
                                       args.ly_km * 1e3)
    except MeshError as exc:
        print(f"mesh construction failed: {exc}", file=sys.stderr)
        return EXIT_MESH
    export_csv(mesh, args.out)
    print(f"wrote triangles.csv, edges.csv, duals.csv to {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swedecay",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="integrate a benchmark scenario")
    p.add_argument("--config", required=True, help="path to the run config")
    p.add_argument("--out", help="output directory (overrides config)")
    p.add_argument("--mode", choices=("none", "casimir", "biharmonic"),
                   help="dissipation mode (overrides config)")
    p.add_argument("--deterministic", action="store_true",
                   help="single-threaded, fixed reduction order")
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("convergence-commutator",
                       help="bracket convergence study")
    p.add_argument("--domain", choices=("plane", "plane-irregular", "sphere"),
                   default="plane")
    p.add_argument("--levels", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="CSV output path (default stdout)")
    p.set_defaults(func=cmd_convergence_commutator)

    p = sub.add_parser("convergence-energy",
                       help="energy error vs time step")
    p.add_argument("--case", default="vortex")
    p.add_argument("--dts", required=True,
                   help="comma-separated time steps in seconds")
    p.add_argument("--days", type=float, default=2.0)
    p.add_argument("--nx", type=int, default=32)
    p.add_argument("--out", help="CSV output path (default stdout)")
    p.set_defaults(func=cmd_convergence_energy)

    p = sub.add_parser("spectra", help="spectra from a checkpoint")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--grid", type=int, default=256)
    p.add_argument("--manifest",
                   help="manifest.json (default: next to the checkpoint)")
    p.add_argument("--out", help="output CSV (default spectrum.csv)")
    p.set_defaults(func=cmd_spectra)

    p = sub.add_parser("export-mesh", help="write mesh entity tables as CSV")
    p.add_argument("--kind", choices=("plane_regular", "plane_irregular",
                                      "sphere"), default="plane_regular")
    p.add_argument("--nx", type=int, default=8)
    p.add_argument("--ny", type=int, default=8)
    p.add_argument("--lx-km", type=float, default=5000.0)
    p.add_argument("--ly-km", type=float, default=4330.0)
    p.add_argument("--level", type=int, default=2)
    p.add_argument("--radius", type=float, default=6.37122e6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export_mesh)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except MeshError as exc:
        print(f"mesh error: {exc}", file=sys.stderr)
        return EXIT_MESH
    except NumericsError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICS


if __name__ == "__main__":
    sys.exit(main())
