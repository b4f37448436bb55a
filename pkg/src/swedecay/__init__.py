"""Structure-preserving rotating shallow-water solver on triangular C-grids.

Conserves energy while selectively dissipating potential enstrophy via a
bracket-based dissipation term; also ships a biharmonic baseline, mesh
builders for the doubly periodic plane and the icosahedral sphere, and
benchmark scenarios behind a CLI.
"""

__version__ = "0.1.0"

from .mesh import (Mesh, build_plane_irregular, build_plane_regular,
                   build_sphere, validate)

__all__ = [
    "__version__",
    "Mesh", "build_plane_regular", "build_plane_irregular", "build_sphere",
    "validate",
]
