"""Run configuration: flat key=value text with one section per module.

All physical keys carry unit suffixes (or are the documented benchmark
symbols inside ``[case]``).  Unknown keys are rejected so typos cannot
silently fall back to defaults.  Example::

    [run]
    case = vortex_pair
    mode = casimir
    out_dir = out/vortex

    [grid]
    kind = plane_regular
    nx = 64
    ny = 64
    lx_km = 5000
    ly_km = 4330

    [time]
    t_end_days = 10

    [dissipation]
    theta_km4_day = 2.0
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field

import numpy as np

from .cases import CASE_DISSIPATION, CASE_NAMES, CaseSpec, EARTH_OMEGA, \
    EARTH_RADIUS, F_PLANE_DEFAULT, GRAVITY
from .dissipation import DissipationConfig
from .errors import ConfigError
from .integrator import TimeConfig
from .mesh import Mesh, build_plane_irregular, build_plane_regular, build_sphere

_KNOWN = {
    "run": {"case", "mode", "out_dir", "deterministic", "threads"},
    "grid": {"kind", "nx", "ny", "lx_km", "ly_km", "refinement_level",
             "radius_m", "seed", "refinement_factor", "jitter"},
    "time": {"dt_s", "cfl", "t_end_days", "t_end_s", "fp_tol_m_per_s",
             "fp_max_iters", "linear_tol"},
    "physics": {"g_m_per_s2", "f_per_s", "omega_per_s"},
    "dissipation": {"theta_km4_day", "nu_km4_per_day"},
    # benchmark symbols; units: H0, Hp, sx, sy, h0 in m; lambda_x, sigma_y,
    # kappa dimensionless; u0 in m/s; theta km^4*day; nu km^4/day; f, Omega
    # in 1/s; g in m/s^2; R in m; lambda_c, theta_c in rad
    "case": {"H0", "Hp", "sx", "sy", "lambda_x", "sigma_y", "kappa", "u0",
             "h0", "theta", "nu", "f", "g", "R", "Omega",
             "lambda_c", "theta_c"},
    "output": {"diag_every_steps", "snapshot_every_steps",
               "checkpoint_every_steps"},
}


@dataclass
class GridConfig:
    kind: str = "plane_regular"
    nx: int = 64
    ny: int = 64
    lx: float = 5000e3
    ly: float = 4330e3
    refinement_level: int = 5
    radius: float = EARTH_RADIUS
    seed: int = 0
    refinement_factor: float = 1.0
    jitter: float = 0.25

    def build(self) -> Mesh:
        if self.kind == "plane_regular":
            return build_plane_regular(self.nx, self.ny, self.lx, self.ly)
        if self.kind == "plane_irregular":
            return build_plane_irregular(self.nx, self.ny, self.lx, self.ly,
                                         refinement_factor=self.refinement_factor,
                                         seed=self.seed, jitter=self.jitter)
        if self.kind == "sphere":
            return build_sphere(self.refinement_level, self.radius)
        raise ConfigError(f"unknown grid kind {self.kind!r}")


@dataclass
class OutputConfig:
    diag_every_steps: int = 10
    snapshot_every_steps: int = 0      # 0: initial and final only
    checkpoint_every_steps: int = 0    # 0: final only


@dataclass
class SimConfig:
    case: CaseSpec = field(default_factory=lambda: CaseSpec("vortex_pair"))
    mode: str = "none"
    out_dir: str = "out"
    deterministic: bool = False
    threads: int = 1
    grid: GridConfig = field(default_factory=GridConfig)
    time: TimeConfig = field(default_factory=TimeConfig)
    dissipation: DissipationConfig = field(default_factory=DissipationConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    def as_dict(self) -> dict:
        return {
            "run": {"case": self.case.name, "mode": self.mode,
                    "out_dir": self.out_dir,
                    "deterministic": self.deterministic,
                    "threads": self.threads},
            "case_params": dict(self.case.params),
            "grid": vars(self.grid).copy(),
            "time": {k: v for k, v in vars(self.time).items()},
            "dissipation": {"mode": self.dissipation.mode,
                            "theta_km4_day": self.dissipation.theta,
                            "nu_km4_per_day": self.dissipation.nu},
            "output": vars(self.output).copy(),
        }


def _get(parser, section, key, cast, default, errors: list):
    if not parser.has_option(section, key):
        return default
    raw = parser.get(section, key)
    try:
        if cast is bool:
            return raw.strip().lower() in ("1", "true", "yes", "on")
        return cast(raw)
    except ValueError:
        errors.append(f"[{section}] {key} = {raw!r}: expected {cast.__name__}")
        return default


def parse_config(path: str) -> SimConfig:
    """Parse and validate a run configuration; raises ConfigError with the
    offending section/key (and line numbers for syntax errors)."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        with open(path) as f:
            parser.read_file(f)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"config syntax error: {exc}") from exc

    errors: list[str] = []
    for section in parser.sections():
        if section not in _KNOWN:
            errors.append(f"unknown section [{section}]")
            continue
        for key in parser.options(section):
            if key not in _KNOWN[section] and key.lower() not in {
                    k.lower() for k in _KNOWN[section]}:
                errors.append(f"unknown key [{section}] {key}")

    cfg = SimConfig()
    case_name = _get(parser, "run", "case", str, "vortex_pair", errors)
    if case_name not in CASE_NAMES:
        errors.append(f"[run] case = {case_name!r}: expected one of {CASE_NAMES}")
        case_name = "vortex_pair"
    cfg.mode = _get(parser, "run", "mode", str, "none", errors)
    if cfg.mode not in ("none", "casimir", "biharmonic"):
        errors.append(f"[run] mode = {cfg.mode!r}: expected none|casimir|biharmonic")
        cfg.mode = "none"
    cfg.out_dir = _get(parser, "run", "out_dir", str, "out", errors)
    cfg.deterministic = _get(parser, "run", "deterministic", bool, False, errors)
    cfg.threads = _get(parser, "run", "threads", int, 1, errors)

    g = cfg.grid
    g.kind = _get(parser, "grid", "kind", str,
                  "sphere" if case_name == "mountain" else "plane_regular",
                  errors)
    g.nx = _get(parser, "grid", "nx", int, g.nx, errors)
    g.ny = _get(parser, "grid", "ny", int, g.ny, errors)
    g.lx = _get(parser, "grid", "lx_km", float, g.lx / 1e3, errors) * 1e3
    g.ly = _get(parser, "grid", "ly_km", float, g.ly / 1e3, errors) * 1e3
    g.refinement_level = _get(parser, "grid", "refinement_level", int,
                              g.refinement_level, errors)
    g.radius = _get(parser, "grid", "radius_m", float, g.radius, errors)
    g.seed = _get(parser, "grid", "seed", int, g.seed, errors)
    g.refinement_factor = _get(parser, "grid", "refinement_factor", float,
                               g.refinement_factor, errors)
    g.jitter = _get(parser, "grid", "jitter", float, g.jitter, errors)

    t = cfg.time
    dt = _get(parser, "time", "dt_s", float, 0.0, errors)
    t.dt = dt if dt > 0 else None
    t.cfl = _get(parser, "time", "cfl", float, t.cfl, errors)
    t_end_days = _get(parser, "time", "t_end_days", float, None, errors)
    t_end_s = _get(parser, "time", "t_end_s", float, None, errors)
    if t_end_days is not None and t_end_s is not None:
        errors.append("[time] give either t_end_days or t_end_s, not both")
    t.t_end = (t_end_days or 0.0) * 86400.0 if t_end_days is not None \
        else (t_end_s or 0.0)
    t.fp_tol = _get(parser, "time", "fp_tol_m_per_s", float, t.fp_tol, errors)
    t.fp_max_iters = _get(parser, "time", "fp_max_iters", int,
                          t.fp_max_iters, errors)
    t.linear_tol = _get(parser, "time", "linear_tol", float, t.linear_tol,
                        errors)

    case_params: dict = {}
    if parser.has_section("physics"):
        gval = _get(parser, "physics", "g_m_per_s2", float, None, errors)
        fval = _get(parser, "physics", "f_per_s", float, None, errors)
        oval = _get(parser, "physics", "omega_per_s", float, None, errors)
        if gval is not None:
            case_params["g"] = gval
        if fval is not None:
            case_params["f"] = fval
        if oval is not None:
            case_params["Omega"] = oval
    if parser.has_section("case"):
        for key in parser.options("case"):
            # configparser lowercases keys; restore the documented spellings
            canon = {k.lower(): k for k in _KNOWN["case"]}.get(key, key)
            case_params[canon] = _get(parser, "case", key, float, 0.0, errors)

    diss_defaults = CASE_DISSIPATION.get(case_name, {"nu": 0.0, "theta": 0.0})
    theta = _get(parser, "dissipation", "theta_km4_day", float,
                 case_params.get("theta", diss_defaults["theta"]), errors)
    nu = _get(parser, "dissipation", "nu_km4_per_day", float,
              case_params.get("nu", diss_defaults["nu"]), errors)
    try:
        cfg.dissipation = DissipationConfig(cfg.mode, theta=theta, nu=nu)
    except ValueError as exc:
        errors.append(str(exc))

    o = cfg.output
    o.diag_every_steps = _get(parser, "output", "diag_every_steps", int,
                              o.diag_every_steps, errors)
    o.snapshot_every_steps = _get(parser, "output", "snapshot_every_steps",
                                  int, o.snapshot_every_steps, errors)
    o.checkpoint_every_steps = _get(parser, "output", "checkpoint_every_steps",
                                    int, o.checkpoint_every_steps, errors)

    if errors:
        raise ConfigError("bad configuration:\n  " + "\n  ".join(errors))

    cfg.case = CaseSpec(case_name, case_params)
    return cfg
