from .core import Mesh, build_mesh
from .plane import build_plane_irregular, build_plane_regular, delaunay_periodic
from .sphere import build_sphere
from .validate import MeshReport, validate
from .export import export_csv

__all__ = [
    "Mesh", "build_mesh",
    "build_plane_regular", "build_plane_irregular", "delaunay_periodic",
    "build_sphere", "validate", "MeshReport", "export_csv",
]
