"""Exception types shared across the package."""


class SwedecayError(Exception):
    """Base class for package errors."""


class MeshError(SwedecayError):
    """Mesh construction or validation failure."""


class ConfigError(SwedecayError):
    """Bad or inconsistent run configuration."""


class NumericsError(SwedecayError):
    """Numerical failure during time stepping (positivity, solver, fixed point)."""
