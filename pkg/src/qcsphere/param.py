"""Spherical conformal initialisation and spherical quasiconformal
parameterization with a prescribed per-face dilation.

Planar domains in this module are the *reflected* north-pole projection
``conj(P_N(p))``. The reflection makes faces of an outward-oriented sphere
positively oriented in the plane; it changes neither ``|mu|`` nor the
dilation of any map.
"""

import logging
import warnings
from contextlib import contextmanager
from dataclasses import dataclass, field

import numpy as np

from .exceptions import MeshValidationError, StageError
from .mesh import TriangleMesh, cotangent_laplacian, isometric_embedding, most_regular_face, validate_genus0
from .qc import (dilation_r3, face_beltrami, inverse_stereographic, inverse_stereographic_south,
                 mu_from_dilation, rotation_to_north, stereographic_north, stereographic_south)
from .solver import RTOL, assemble_generalized_laplacian, solve_dirichlet

logger = logging.getLogger(__name__)

BIG_TRIANGLE_RADIUS = 1e4
# vertices of the conformal init with |P_S(p)| <= this radius are re-solved
SOUTH_STEP_RADIUS = 1.0
HIST_BINS = 64


@dataclass(frozen=True, eq=False)
class PlanarEmbedding:
    """Complex vertex positions sharing a mesh's connectivity.

    ``outer_face`` is the face that contains infinity on the sphere; it is
    left out of every assembly.
    """

    z: np.ndarray
    faces: np.ndarray
    outer_face: int = None

    def with_z(self, z):
        return PlanarEmbedding(np.asarray(z, dtype=complex), self.faces, self.outer_face)

    def signed_areas(self):
        p = self.z[self.faces]
        return 0.5 * ((p[:, 1] - p[:, 0]).conjugate() * (p[:, 2] - p[:, 0])).imag


@dataclass(frozen=True, eq=False)
class SphericalEmbedding:
    """Unit-sphere vertex positions with the source mesh's faces.

    ``planar`` is the balanced planar domain the sphere was lifted from
    and ``report`` the dilation statistics against the input mesh, when the
    producing routine computed them.
    """

    points: np.ndarray
    faces: np.ndarray
    planar: PlanarEmbedding = None
    report: "DilationReport" = None
    n_outlying: int = 0

    def as_mesh(self):
        return TriangleMesh(self.points, self.faces)

    def flipped_faces(self):
        return flipped_faces(self.points, self.faces)


@dataclass
class DilationReport:
    """Per-face dilation statistics of a parameterization."""

    n_faces: int
    mean: float
    sd: float
    max: float
    flips: int  # None when the target is not on the unit sphere
    hist_edges: np.ndarray
    hist_counts: np.ndarray
    target_mean: float = float("nan")
    target_sd: float = float("nan")
    dilation: np.ndarray = field(default=None, repr=False)

    @property
    def mean_drift(self):
        return self.mean - self.target_mean

    @property
    def sd_drift(self):
        return self.sd - self.target_sd

    def rows(self):
        return [("faces", self.n_faces), ("target_mean", self.target_mean),
                ("target_sd", self.target_sd), ("mean", self.mean), ("sd", self.sd),
                ("max", self.max), ("mean_drift", self.mean_drift),
                ("sd_drift", self.sd_drift), ("flips", self.flips)]

    def summary(self):
        flips = "n/a" if self.flips is None else self.flips
        out = f"{self.n_faces} faces | "
        if np.isfinite(self.target_mean):
            out += f"target dilation mean {self.target_mean:.4f} sd {self.target_sd:.4f} | "
        out += f"resulting mean {self.mean:.4f} sd {self.sd:.4f} max {self.max:.4f}"
        if np.isfinite(self.target_mean):
            out += f" | drift {self.mean_drift:+.4f} / {self.sd_drift:+.4f}"
        return out + f" | flips {flips}"


@contextmanager
def _stage(name):
    try:
        yield
    except StageError:
        raise
    except Exception as exc:
        raise StageError(name, exc) from exc


def flipped_faces(points, faces):
    """Faces of a sphere embedding whose normal points towards the origin."""
    p = np.asarray(points)[faces]
    n = np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0])
    return np.flatnonzero(np.einsum("ij,ij->i", n, p.sum(1)) <= 0)


def sphere_to_plane(points):
    """Reflected north-pole projection ``conj(P_N(p))``."""
    return np.conj(stereographic_north(points))


def plane_to_sphere(z):
    """Inverse of :func:`sphere_to_plane`."""
    return inverse_stereographic(np.conj(np.asarray(z, dtype=complex)))


def balancing_scale(domain):
    """Scale a planar domain so the outer face and the innermost face land on
    spherical triangles of comparable size.

    ``r_out`` is the mean vertex modulus of the outer face and ``r_in`` the
    mean vertex modulus of the innermost face (smallest centroid modulus).
    Coordinates are multiplied by ``1 / sqrt(r_out * r_in)`` so the scaled
    radii multiply to 1 and the two faces lift to mirrored latitudes.
    Centroid moduli alone are unusable here: a face that surrounds the
    origin has a centroid near 0.
    """
    faces = domain.faces
    if domain.outer_face is None:
        raise ValueError("balancing needs an outer face")
    z = domain.z
    inner = np.ones(len(faces), dtype=bool)
    inner[domain.outer_face] = False
    if not inner.any():
        raise ValueError("balancing needs at least one non-outer face")
    r_out = np.abs(z[faces[domain.outer_face]]).mean()
    cand = np.flatnonzero(inner)
    t = cand[np.argmin(np.abs(z[faces[cand]].mean(1)))]
    r_in = np.abs(z[faces[t]]).mean()
    if not r_in > 0:
        warnings.warn("innermost face collapsed onto the origin; balancing skipped", RuntimeWarning)
        return domain
    return domain.with_z(z / np.sqrt(r_out * r_in))


def _check_mesh(mesh):
    rep = validate_genus0(mesh)
    if not rep.passed:
        raise MeshValidationError(f"input is not a closed genus-0 mesh: {rep}", rep)


def _big_triangle(radius=BIG_TRIANGLE_RADIUS):
    # clockwise, so the remaining faces come out counter-clockwise
    return radius * np.exp(1j * (np.pi / 2 - 2 * np.pi * np.arange(3) / 3))


def _south_step(mesh, S, radius=SOUTH_STEP_RADIUS):
    """Remove the distortion near the north pole of a nearly conformal sphere.

    In the south-pole projection ``w`` the northern cap is ``|w| <= radius``.
    Its vertices are re-solved with the Beltrami coefficient of the map from
    ``w`` back to the input surface while the rest stay fixed; composing
    the two cancels the distortion of the cap.
    """
    faces = mesh.faces
    w = stereographic_south(S)
    free = np.abs(w) <= radius
    if free.all() or not free.any():
        return S
    active = free[faces].any(axis=1)
    mu = np.zeros(len(faces), dtype=complex)
    mu[active] = face_beltrami(w[faces[active]], isometric_embedding(mesh.vertices, faces[active]))
    mu[active] = np.where(np.abs(mu[active]) < 1.0, mu[active], 0.0)
    L = assemble_generalized_laplacian(w, faces, mu, excluded=np.flatnonzero(~active))
    fixed = np.flatnonzero(~free)
    w = solve_dirichlet(L, fixed, w[fixed])
    return inverse_stereographic_south(w)


def spherical_conformal_init(mesh, south_radius=SOUTH_STEP_RADIUS):
    """Bijective, nearly conformal map of a genus-0 mesh onto the unit sphere.

    1. Pick the most regular face ``T0`` and map the rest of the mesh
       harmonically (cotangent weights) into a big equilateral triangle
       that ``T0`` is sent to.
    2. Centre, balance and lift to the sphere.
    3. Re-solve the northern cap with a Beltrami correction
       (see :func:`_south_step`).
    4. Balance again and lift.

    Raises
    ------
    MeshValidationError
        ``mesh`` is not closed, oriented and genus 0.
    StageError
        A later stage failed, or the result has flipped faces.
    """
    with _stage("validation"):
        _check_mesh(mesh)
    faces = mesh.faces
    with _stage("harmonic map"):
        t0 = most_regular_face(mesh)
        L = cotangent_laplacian(mesh.vertices, faces)
        z = solve_dirichlet(L, faces[t0], _big_triangle())
        dom = balancing_scale(PlanarEmbedding(z - z.mean(), faces, t0))
        S = plane_to_sphere(dom.z)
    with _stage("south-pole correction"):
        S = _south_step(mesh, S, south_radius)
    with _stage("balancing"):
        dom = balancing_scale(PlanarEmbedding(sphere_to_plane(S), faces, t0))
        S = plane_to_sphere(dom.z)
    flips = flipped_faces(S, faces)
    if len(flips):
        raise StageError("conformal init", RuntimeError(f"{len(flips)} flipped faces"))
    return SphericalEmbedding(S, faces, planar=dom)


@dataclass(frozen=True)
class BoundaryMapCoefficients:
    """Affine map ``(x, y) -> (a x + b y + r, c x + d y + s)``."""

    a: float
    b: float
    c: float
    d: float
    r: float
    s: float

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        x, y = z.real, z.imag
        return (self.a * x + self.b * y + self.r) + 1j * (self.c * x + self.d * y + self.s)

    @property
    def jacobian(self):
        return self.a * self.d - self.b * self.c

    def as_array(self):
        return np.array([self.a, self.b, self.c, self.d, self.r, self.s])


def boundary_system(v1, v2, K):
    """The 6x6 system fixing ``v1`` and ``v2`` and imposing dilation ``K``
    (argument 0) on the affine map. Returns ``(matrix, rhs)``."""
    x1, y1 = np.real(v1), np.imag(v1)
    x2, y2 = np.real(v2), np.imag(v2)
    M = np.array([
        [x1, y1, 0, 0, 1, 0],
        [0, 0, x1, y1, 0, 1],
        [x2, y2, 0, 0, 1, 0],
        [0, 0, x2, y2, 0, 1],
        [1.0 / K, 0, 0, -1, 0, 0],
        [0, K, 1, 0, 0, 0],
    ], dtype=float)
    return M, np.array([x1, y1, x2, y2, 0.0, 0.0])


def boundary_map_coefficients(v1, v2, K):
    """Affine map with Beltrami coefficient ``(K-1)/(K+1)`` fixing ``v1``, ``v2``."""
    if K < 1 or not np.isfinite(K):
        raise ValueError("K must be >= 1 and finite")
    if v1 == v2:
        raise ValueError("boundary vertices coincide")
    M, rhs = boundary_system(v1, v2, K)
    return BoundaryMapCoefficients(*np.linalg.solve(M, rhs))


def _check_dilation(K, n_faces):
    K = np.asarray(K, dtype=float)
    if K.ndim == 0:
        K = np.full(n_faces, float(K))
    if K.shape != (n_faces,):
        raise ValueError(f"dilation field has {K.size} values for {n_faces} faces")
    if np.any(~np.isfinite(K)) or np.any(K < 1):
        raise ValueError("K must be >= 1")
    return K


def _outside_triangle(z, tri):
    """Mask of points strictly outside the triangle ``tri`` (3 complex)."""
    a, b, c = tri
    orient = np.sign(((b - a).conjugate() * (c - a)).imag)

    def side(p, q):
        return orient * ((q - p).conjugate() * (z - p)).imag

    return (side(a, b) < 0) | (side(b, c) < 0) | (side(c, a) < 0)


def principal_rotation_angle(z, p1, p2):
    """``Arg(z[p2] - z[p1])`` in ``(-pi, pi]``."""
    if p1 == p2:
        raise ValueError("p1 and p2 must differ")
    d = complex(z[p2] - z[p1])
    if d == 0:
        raise ValueError("p1 and p2 have coincident images")
    theta = float(np.angle(d))
    return np.pi if theta == -np.pi else theta


def stretch_axis_rotation(zT, K, n_angles=720):
    """Rotation angle for the planar domain when no direction is prescribed.

    The real Beltrami coefficient stretches along the x-axis, which near the
    north pole acts as a non-smooth cone map. Among ``n_angles`` rotations of
    the outer face ``zT`` this picks the one whose stretched image, seen from
    infinity (``w = 1/z``), keeps the pole furthest from its edges relative
    to its size. Returns 0 when ``K == 1``.
    """
    zT = np.asarray(zT, dtype=complex)
    if K <= 1.0:
        return 0.0
    alpha = np.linspace(0.0, 2 * np.pi, n_angles, endpoint=False)
    u = zT[None, :] * np.exp(1j * alpha)[:, None]
    w = 1.0 / (u.real + 1j * u.imag / K)
    a, b = w, np.roll(w, -1, axis=1)
    e = b - a
    dist = np.abs((e.conjugate() * -a).imag) / np.abs(e)
    q = dist.min(1) / np.abs(w).max(1)
    return float(alpha[np.argmax(q)])


def fsqc_parameterize(mesh, K, direction=None, init=None, method="direct", rtol=RTOL):
    """Spherical parameterization of ``mesh`` with per-face dilation ``K``.

    Parameters
    ----------
    mesh : TriangleMesh
        Closed genus-0 input.
    K : float or array_like, shape (n_faces,)
        Target dilation, ``K >= 1``.
    direction : (int, int), optional
        Vertices ``(p1, p2)``; the planar domain is rotated so that ``p1 -> p2``
        points along the stretch axis of the (real) Beltrami coefficient.
        Without it the rotation is chosen by :func:`stretch_axis_rotation`.
    init : SphericalEmbedding, optional
        Precomputed conformal initialisation.
    method : {"direct", "cg"}
        Linear solver for the Beltrami solve.
    rtol : float
        Relative residual required of that solve.

    Returns
    -------
    SphericalEmbedding
        With ``report`` holding the measured dilation against ``mesh``.

    Raises
    ------
    StageError
        Naming the failing stage; the cause is attached.
    """
    with _stage("validation"):
        _check_mesh(mesh)
        K = _check_dilation(K, mesh.n_faces)
        if direction is not None:
            p1, p2 = (int(i) for i in direction)
            if p1 == p2:
                raise ValueError("p1 and p2 must differ")
            if not (0 <= p1 < mesh.n_vertices and 0 <= p2 < mesh.n_vertices):
                raise ValueError("direction vertex out of range")
    faces = mesh.faces
    with _stage("conformal init"):
        sph = init if init is not None else spherical_conformal_init(mesh)
    with _stage("projection"):
        T = most_regular_face(TriangleMesh(sph.points, faces))
        R = rotation_to_north(sph.points[faces[T]].mean(0))
        P = sph.points @ R.T
        P /= np.linalg.norm(P, axis=1)[:, None]
        z = sphere_to_plane(P)
        if direction is not None:
            z = z * np.exp(-1j * principal_rotation_angle(z, p1, p2))
        else:
            z = z * np.exp(1j * stretch_axis_rotation(z[faces[T]], K[T]))
    with _stage("beltrami solve"):
        mu = mu_from_dilation(K)
        i1, i2, i3 = faces[T]
        h = boundary_map_coefficients(z[i1], z[i2], K[T])
        L = assemble_generalized_laplacian(z, faces, mu, excluded=[T])
        w = solve_dirichlet(L, [i1, i2, i3], [z[i1], z[i2], h(z[i3])], method=method, rtol=rtol)
        outlying = _outside_triangle(w, w[faces[T]])
        outlying[faces[T]] = False
        n_out = int(outlying.sum())
        if n_out:
            warnings.warn(f"{n_out} vertices lie outside the outer triangle", RuntimeWarning)
    with _stage("normalization"):
        dom = balancing_scale(PlanarEmbedding(w - w.mean(), faces, T))
    with _stage("inverse projection"):
        S = plane_to_sphere(dom.z)
    with _stage("verification"):
        report = verify_dilation(mesh, S, K)
    if report.flips:
        warnings.warn(f"parameterization has {report.flips} flipped faces", RuntimeWarning)
    return SphericalEmbedding(S, faces, planar=dom, report=report, n_outlying=n_out)


def verify_dilation(mesh, sphere, target=None):
    """Dilation statistics of the map ``mesh -> sphere``.

    ``sphere`` is a :class:`SphericalEmbedding`, :class:`TriangleMesh` or an
    ``(n, 3)`` array. The histogram has 64 bins on
    ``[1, max(8, 1.2 * max(target))]``; values beyond the range are counted in
    the last bin. ``flips`` is None unless ``sphere`` lies on the unit sphere.
    """
    if isinstance(sphere, SphericalEmbedding):
        pts = sphere.points
    elif isinstance(sphere, TriangleMesh):
        pts = sphere.vertices
    else:
        pts = np.asarray(sphere, dtype=float)
    Kr = dilation_r3(mesh, TriangleMesh(pts, mesh.faces))
    on_sphere = np.all(np.abs(np.linalg.norm(pts, axis=1) - 1.0) <= 1e-9)
    flips = len(flipped_faces(pts, mesh.faces)) if on_sphere else None
    hi = 8.0
    tmean = tsd = float("nan")
    if target is not None:
        target = _check_dilation(target, mesh.n_faces)
        hi = max(8.0, 1.2 * float(target.max()))
        tmean, tsd = float(target.mean()), float(target.std())
    counts, edges = np.histogram(np.clip(Kr, 1.0, hi), bins=HIST_BINS, range=(1.0, hi))
    return DilationReport(
        n_faces=mesh.n_faces, mean=float(Kr.mean()), sd=float(Kr.std()), max=float(Kr.max()),
        flips=flips, hist_edges=edges, hist_counts=counts,
        target_mean=tmean, target_sd=tsd, dilation=Kr)
