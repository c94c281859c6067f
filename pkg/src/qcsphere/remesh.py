"""Adaptive remeshing through a quasiconformal spherical parameterization.

The vertex set never changes. Only the connectivity is recomputed: the
spherical image of the vertices is triangulated (Delaunay on the sphere)
and the resulting faces are applied to the original 3D positions.
"""

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .exceptions import NonManifoldError
from .io import read_face_selection
from .mesh import TriangleMesh, corner_angles, validate_genus0
from .param import _stage, fsqc_parameterize, principal_rotation_angle  # noqa: F401  (re-export)
from .qc import UNIT_TOL
from .solver import RTOL

EMPTY_CAP_TOL = 1e-9


@dataclass(frozen=True)
class RegionSpec:
    """Faces to distort, their dilation and the principal direction ``p1 -> p2``."""

    region: np.ndarray
    k_region: float
    p1: int
    p2: int

    def __post_init__(self):
        region = np.unique(np.asarray(self.region, dtype=np.int64))
        if len(region) != len(np.asarray(self.region).ravel()):
            raise ValueError("region faces must be unique")
        object.__setattr__(self, "region", region)
        if not np.isfinite(self.k_region) or self.k_region < 1:
            raise ValueError("K must be >= 1")
        if int(self.p1) == int(self.p2):
            raise ValueError("p1 and p2 must differ")

    def check(self, mesh):
        if len(self.region) and (self.region.min() < 0 or self.region.max() >= mesh.n_faces):
            raise ValueError("region face index out of range")
        for p in (self.p1, self.p2):
            if not 0 <= int(p) < mesh.n_vertices:
                raise ValueError(f"direction vertex {p} out of range")


def read_region_spec(path):
    """Parse a region spec file of ``key = value`` lines.

    Keys are ``faces`` (path of a face-index file, relative to the spec
    file; optional, an absent key means an empty region), ``k``, ``p1`` and
    ``p2``. ``#`` starts a comment.
    """
    path = Path(path)
    values = {}
    for lineno, line in enumerate(path.read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        if not sep:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        values[key.strip().lower()] = val.strip()
    missing = [k for k in ("k", "p1", "p2") if k not in values]
    if missing:
        raise ValueError(f"{path}: missing keys {', '.join(missing)}")
    region = np.zeros(0, dtype=np.int64)
    if values.get("faces"):
        fpath = Path(values["faces"])
        if not fpath.is_absolute():
            fpath = path.parent / fpath
        region = read_face_selection(fpath)
    try:
        k, p1, p2 = float(values["k"]), int(values["p1"]), int(values["p2"])
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from exc
    return RegionSpec(region, k, p1, p2)


def write_region_spec(path, spec, faces_path):
    Path(path).write_text(f"faces = {faces_path}\nk = {spec.k_region!r}\n"
                          f"p1 = {int(spec.p1)}\np2 = {int(spec.p2)}\n")


def build_dilation_field(mesh, spec):
    """``K_region`` on the region faces, 1 elsewhere."""
    if spec.k_region < 1:
        raise ValueError("K must be >= 1")
    spec.check(mesh)
    K = np.ones(mesh.n_faces)
    K[spec.region] = spec.k_region
    return K


def spherical_delaunay(points):
    """Delaunay triangulation of points on the unit sphere (their convex hull).

    Parameters
    ----------
    points : array_like, shape (n, 3)
        Unit vectors, or a :class:`~qcsphere.param.SphericalEmbedding`.

    Returns
    -------
    ndarray of int, shape (2n - 4, 3)
        Outward oriented faces.

    Raises
    ------
    ValueError
        Fewer than 4 points, points off the sphere, coplanar input, or a
        point that does not appear on the hull (duplicates).
    """
    pts = getattr(points, "points", points)
    pts = np.asarray(pts, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise ValueError("points must have shape (n, 3)")
    if len(pts) < 4:
        raise ValueError("spherical Delaunay needs at least 4 points")
    if np.any(np.abs(np.linalg.norm(pts, axis=1) - 1.0) > UNIT_TOL):
        raise ValueError("points must lie on the unit sphere")
    try:
        hull = ConvexHull(pts)
    except QhullError as exc:
        raise ValueError(f"degenerate (coplanar) input: {str(exc).splitlines()[0]}") from exc
    if len(hull.vertices) != len(pts):
        missing = np.setdiff1d(np.arange(len(pts)), hull.vertices)
        raise ValueError(f"{len(missing)} points are not hull vertices (first: {missing[0]})")
    faces = hull.simplices.copy()
    p = pts[faces]
    n = np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0])
    inward = np.einsum("ij,ij->i", n, p.sum(1)) < 0
    faces[inward] = faces[inward][:, ::-1]
    # deterministic order: rotate each triple to start at its smallest index, sort rows
    r = np.argmin(faces, axis=1)
    faces = np.stack([faces[np.arange(len(faces)), (r + k) % 3] for k in range(3)], axis=1)
    return faces[np.lexsort(faces.T[::-1])]


def empty_cap_violations(points, faces, tol=EMPTY_CAP_TOL):
    """Brute-force check of the empty-circumcap property.

    For every face the plane through its corners bounds the cap; a point is
    inside the cap when it lies strictly beyond that plane by more than
    ``tol``. Returns ``(face, point)`` pairs that violate it.
    """
    pts = np.asarray(points, dtype=float)
    p = pts[faces]
    n = np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0])
    n /= np.linalg.norm(n, axis=1)[:, None]
    off = np.einsum("ij,ij->i", n, p[:, 0])
    out = []
    for start in range(0, len(faces), 1024):
        s = slice(start, start + 1024)
        d = pts @ n[s].T - off[s]
        f, q = np.nonzero(d.T > tol)
        out.append(np.column_stack([f + start, q]))
    return np.concatenate(out) if out else np.zeros((0, 2), dtype=np.int64)


@dataclass(frozen=True, eq=False)
class RemeshResult:
    """Remeshed surface with per-face quality metrics.

    ``min_angle`` is in radians; ``aspect_ratio`` is the longest edge over
    twice the inradius (``sqrt(3)`` for an equilateral triangle).
    """

    mesh: TriangleMesh
    min_angle: np.ndarray
    aspect_ratio: np.ndarray
    sphere: object = None

    def region_faces(self, vertex_mask):
        """New faces whose three vertices all satisfy ``vertex_mask``."""
        return np.flatnonzero(np.asarray(vertex_mask)[self.mesh.faces].all(axis=1))


def triangle_quality(vertices, faces):
    """Per-face ``(min_angle, aspect_ratio)``."""
    v = np.asarray(vertices, dtype=float)[faces]
    e = np.linalg.norm(v[:, [1, 2, 0]] - v[:, [2, 0, 1]], axis=2)
    area = 0.5 * np.linalg.norm(np.cross(v[:, 1] - v[:, 0], v[:, 2] - v[:, 0]), axis=1)
    with np.errstate(divide="ignore"):
        inradius = area / (0.5 * e.sum(1))
        aspect = e.max(1) / (2.0 * inradius)
    return corner_angles(vertices, faces).min(1), aspect


def induced_triangulation(original, sphere_faces, sphere=None):
    """Apply connectivity computed on the sphere to the original vertices.

    Raises
    ------
    NonManifoldError
        The induced mesh is not a closed, oriented genus-0 surface.
    """
    faces = np.asarray(sphere_faces, dtype=np.int64)
    if faces.size and (faces.min() < 0 or faces.max() >= original.n_vertices):
        raise ValueError("sphere faces reference vertices outside the mesh")
    mesh = TriangleMesh(original.vertices, faces)
    if mesh.signed_volume() < 0:
        mesh = TriangleMesh(original.vertices, faces[:, ::-1])
    rep = validate_genus0(mesh)
    if not rep.passed:
        raise NonManifoldError(f"induced mesh is invalid: {rep}", rep)
    min_angle, aspect = triangle_quality(mesh.vertices, mesh.faces)
    return RemeshResult(mesh, min_angle, aspect, sphere)


def remesh_pipeline(mesh, spec, init=None, method="direct", rtol=RTOL):
    """Dilation field, directed parameterization, spherical Delaunay and the
    induced triangulation, in that order.

    Raises
    ------
    StageError
        Naming the failing stage; the original exception is the cause.
    """
    with _stage("dilation field"):
        K = build_dilation_field(mesh, spec)
    sph = fsqc_parameterize(mesh, K, direction=(spec.p1, spec.p2), init=init, method=method,
                             rtol=rtol)
    with _stage("spherical delaunay"):
        faces = spherical_delaunay(sph.points)
    with _stage("induced triangulation"):
        return induced_triangulation(mesh, faces, sph)
