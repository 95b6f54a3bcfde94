"""Surface meshes and div-conforming spaces."""

from .surface import MeshError, SurfaceMesh, build_mesh, make_icosphere
from .readers import load_mesh, read_gmsh_v2, read_off, write_off
from .spaces import BarycentricRefinement, CurrentSpace, DualSpace, build_current_space

__all__ = ["MeshError", "SurfaceMesh", "build_mesh", "make_icosphere", "load_mesh",
           "read_gmsh_v2", "read_off", "write_off", "BarycentricRefinement",
           "CurrentSpace", "DualSpace", "build_current_space"]
