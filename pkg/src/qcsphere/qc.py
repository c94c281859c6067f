"""Stereographic projections, rotations, Beltrami coefficients and dilations."""

import numpy as np

from .exceptions import DegenerateFaceError
from .mesh import AREA_TOL, isometric_embedding

MU_CAP = 1.0 - 1e-3
POLE_TOL = 1e-12
UNIT_TOL = 1e-9
DENOM_TOL = 1e-14


def _points(p):
    p = np.asarray(p, dtype=float)
    single = p.ndim == 1
    return np.atleast_2d(p), single


def _check_unit(p):
    r = np.linalg.norm(p, axis=1)
    if np.any(np.abs(r - 1.0) > UNIT_TOL):
        i = int(np.argmax(np.abs(r - 1.0)))
        raise ValueError(f"point {i} is not on the unit sphere (|p| = {r[i]!r})")


def _project(p, sign):
    # (x + iy) / (1 - sign*z); near the projection pole 1 - sign*z cancels,
    # so use the equal form (x + iy)(1 + sign*z) / (x^2 + y^2) there
    p = p / np.linalg.norm(p, axis=1)[:, None]
    x, y, h = p[:, 0], p[:, 1], sign * p[:, 2]
    r2 = x * x + y * y
    near = h > 0
    d = np.where(near, r2, 1.0 - h)
    num = np.where(near, 1.0 + h, 1.0)
    return (x + 1j * y) * num / d


def stereographic_north(p):
    """Project unit vectors from the north pole: ``(x + iy) / (1 - z)``.

    Accepts one point ``(3,)`` or an array ``(n, 3)``; returns a complex
    scalar or array accordingly.
    """
    p, single = _points(p)
    _check_unit(p)
    if np.any(1.0 - p[:, 2] < POLE_TOL):
        raise ValueError("north pole maps to infinity")
    z = _project(p, 1.0)
    return z[0] if single else z


def inverse_stereographic(z):
    """Inverse of :func:`stereographic_north`; finite ``z`` to unit vectors."""
    z = np.asarray(z, dtype=complex)
    single = z.ndim == 0
    z = np.atleast_1d(z)
    r2 = (z * z.conjugate()).real
    p = np.column_stack([2 * z.real, 2 * z.imag, r2 - 1.0]) / (r2 + 1.0)[:, None]
    return p[0] if single else p


def stereographic_south(p):
    """Project unit vectors from the south pole: ``(x + iy) / (1 + z)``."""
    p, single = _points(p)
    _check_unit(p)
    if np.any(1.0 + p[:, 2] < POLE_TOL):
        raise ValueError("south pole maps to infinity")
    z = _project(p, -1.0)
    return z[0] if single else z


def inverse_stereographic_south(z):
    z = np.asarray(z, dtype=complex)
    single = z.ndim == 0
    z = np.atleast_1d(z)
    r2 = (z * z.conjugate()).real
    p = np.column_stack([2 * z.real, 2 * z.imag, 1.0 - r2]) / (r2 + 1.0)[:, None]
    return p[0] if single else p


def _skew(v):
    return np.array([[0.0, -v[2], v[1]], [v[2], 0.0, -v[0]], [-v[1], v[0], 0.0]])


def rotation_to_north(c):
    """Minimal-angle rotation taking direction ``c`` to ``(0, 0, 1)``.

    The antipodal case ``c ~ (0, 0, -1)`` rotates by pi about the x-axis.
    """
    c = np.asarray(c, dtype=float)
    n = np.linalg.norm(c)
    if not n > 0:
        raise ValueError("cannot rotate the zero vector")
    a = c / n
    axis = np.array([a[1], -a[0], 0.0])  # a x (0, 0, 1)
    sin = np.linalg.norm(axis)
    cos = a[2]
    if sin == 0.0:
        return np.eye(3) if cos > 0 else np.diag([1.0, -1.0, -1.0])
    K = _skew(axis / sin)
    # 1 - cos without cancellation near the identity
    one_minus = sin * sin / (1.0 + cos) if cos > 0 else 1.0 - cos
    return np.eye(3) + sin * K + one_minus * (K @ K)


def _gradient_rows(src):
    """Rows ``D_x, D_y`` of the hat-function gradients on planar faces.

    ``src`` is an ``(m, 3)`` complex array of corner positions. Returns
    ``(Dx, Dy, signed_area)``.
    """
    a, b = src.real, src.imag
    area2 = (a[:, 1] - a[:, 0]) * (b[:, 2] - b[:, 0]) - (a[:, 2] - a[:, 0]) * (b[:, 1] - b[:, 0])
    Dx = np.column_stack([b[:, 2] - b[:, 1], b[:, 0] - b[:, 2], b[:, 1] - b[:, 0]]) / area2[:, None]
    Dy = -np.column_stack([a[:, 2] - a[:, 1], a[:, 0] - a[:, 2], a[:, 1] - a[:, 0]]) / area2[:, None]
    return Dx, Dy, 0.5 * area2


def planar_degenerate(src, tol=AREA_TOL):
    """Mask of planar faces (``(m, 3)`` complex) whose area is below tolerance
    relative to the face's own bounding-box diagonal."""
    a, b = src.real, src.imag
    area2 = (a[:, 1] - a[:, 0]) * (b[:, 2] - b[:, 0]) - (a[:, 2] - a[:, 0]) * (b[:, 1] - b[:, 0])
    diag2 = (a.max(1) - a.min(1)) ** 2 + (b.max(1) - b.min(1)) ** 2
    return 0.5 * np.abs(area2) < tol * diag2


def face_beltrami(src, tgt):
    """Beltrami coefficient of the affine map taking each source face to the
    matching target face. Both arguments are ``(m, 3)`` complex arrays."""
    src = np.asarray(src, dtype=complex)
    tgt = np.asarray(tgt, dtype=complex)
    bad = np.flatnonzero(planar_degenerate(src))
    if len(bad):
        raise DegenerateFaceError(f"source face {bad[0]} is degenerate", face=int(bad[0]))
    Dx, Dy, _ = _gradient_rows(src)
    # rows sum to zero; relative corners keep translations exact
    tgt = tgt - tgt[:, :1]
    fzbar = np.einsum("ij,ij->i", Dx + 1j * Dy, tgt)
    fz = np.einsum("ij,ij->i", Dx - 1j * Dy, tgt)
    small = np.abs(fz) < DENOM_TOL
    if small.any():
        i = int(np.flatnonzero(small)[0])
        raise DegenerateFaceError(f"degenerate conformal derivative on face {i}", face=i)
    return fzbar / fz


def beltrami_coefficient(source, target, faces):
    """Per-face Beltrami coefficient of the piecewise-linear map between two
    planar embeddings with shared connectivity.

    Parameters
    ----------
    source, target : array_like of complex, shape (n,)
        Vertex positions in the complex plane.
    faces : array_like of int, shape (m, 3)

    Returns
    -------
    mu : ndarray of complex, shape (m,)
    """
    faces = np.asarray(faces)
    return face_beltrami(np.asarray(source, complex)[faces], np.asarray(target, complex)[faces])


def dilation_from_mu(mu):
    """``K = (1 + |mu|) / (1 - |mu|)``; requires ``|mu| < 1``."""
    m = np.abs(np.asarray(mu))
    if np.any(~(m < 1.0)):
        raise ValueError("|mu| must be < 1")
    K = (1.0 + m) / (1.0 - m)
    return float(K) if K.ndim == 0 else K


def mu_from_dilation(K, cap=MU_CAP):
    """Real, non-negative ``mu = (K - 1) / (K + 1)``, capped at ``cap``."""
    K = np.asarray(K, dtype=float)
    if np.any(~np.isfinite(K)) or np.any(K < 1.0):
        raise ValueError("K must be >= 1 and finite")
    mu = np.minimum((K - 1.0) / (K + 1.0), cap)
    return float(mu) if mu.ndim == 0 else mu


def max_dilation(K):
    K = np.asarray(K, dtype=float)
    if K.size == 0:
        raise ValueError("empty dilation field")
    return float(K.max())


def face_dilation(source_vertices, target_vertices, faces):
    """Per-face dilation between two meshes in R^3 with shared connectivity.

    Each pair of corresponding faces is embedded isometrically in the plane
    and the dilation of the affine map between the embeddings is returned.
    """
    src = isometric_embedding(source_vertices, faces)
    tgt = isometric_embedding(target_vertices, faces)
    return dilation_from_mu(face_beltrami(src, tgt))


def dilation_r3(source, target):
    """:func:`face_dilation` for two :class:`~qcsphere.mesh.TriangleMesh`."""
    if source.faces.shape != target.faces.shape or np.any(source.faces != target.faces):
        raise ValueError("source and target must share connectivity")
    return face_dilation(source.vertices, target.vertices, source.faces)
