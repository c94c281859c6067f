"""Spherical quasiconformal parameterization of genus-0 meshes with a
prescribed per-face dilation, and remeshing through it."""

__version__ = "0.1.0"

from .exceptions import (DegenerateFaceError, MeshFormatError, MeshValidationError,
                         NonManifoldError, SolverError, StageError)
from .io import (load_mesh, read_beltrami_csv, read_dilation_csv, read_face_selection,
                 save_mesh, write_beltrami_csv, write_dilation_csv, write_face_selection)
from .mesh import (EdgeWeightField, TriangleMesh, ValidationReport, cotangent_laplacian,
                   cotangent_weights, isometric_face_embedding, most_regular_face,
                   validate_genus0)
from .param import (BoundaryMapCoefficients, DilationReport, PlanarEmbedding,
                    SphericalEmbedding, balancing_scale, boundary_map_coefficients,
                    fsqc_parameterize, spherical_conformal_init, verify_dilation)
from .qc import (beltrami_coefficient, dilation_from_mu, dilation_r3, inverse_stereographic,
                 max_dilation, mu_from_dilation, rotation_to_north, stereographic_north)
from .remesh import (RegionSpec, RemeshResult, build_dilation_field, induced_triangulation,
                     principal_rotation_angle, read_region_spec, remesh_pipeline,
                     spherical_delaunay)
from .shapes import (ellipsoid, geodesic_sphere, icosahedron, icosphere, ridge_ellipsoid,
                     ridge_region, sphere_with_faces, tetrahedron)
from .solver import AlphaTriple, alpha_coefficients, assemble_generalized_laplacian, solve_dirichlet

__all__ = [
    "AlphaTriple", "BoundaryMapCoefficients", "DegenerateFaceError", "DilationReport",
    "EdgeWeightField", "MeshFormatError", "MeshValidationError", "NonManifoldError",
    "PlanarEmbedding", "RegionSpec", "RemeshResult", "SolverError", "SphericalEmbedding",
    "StageError", "TriangleMesh", "ValidationReport", "alpha_coefficients",
    "assemble_generalized_laplacian", "balancing_scale", "beltrami_coefficient",
    "boundary_map_coefficients", "build_dilation_field", "cotangent_laplacian",
    "cotangent_weights", "dilation_from_mu", "dilation_r3", "ellipsoid", "fsqc_parameterize",
    "geodesic_sphere", "icosahedron", "icosphere",
    "induced_triangulation", "inverse_stereographic", "isometric_face_embedding",
    "load_mesh", "max_dilation", "most_regular_face", "mu_from_dilation",
    "principal_rotation_angle", "read_beltrami_csv", "ridge_ellipsoid", "ridge_region", "read_dilation_csv",
    "read_face_selection", "read_region_spec", "remesh_pipeline", "rotation_to_north",
    "save_mesh", "solve_dirichlet", "sphere_with_faces", "tetrahedron", "spherical_conformal_init", "spherical_delaunay",
    "stereographic_north", "validate_genus0", "verify_dilation", "write_beltrami_csv",
    "write_dilation_csv", "write_face_selection",
]
