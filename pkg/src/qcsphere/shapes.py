"""Synthetic closed meshes: icosahedron, geodesic spheres, ellipsoids, a
ridged ellipsoid, and a torus (for negative tests)."""

import numpy as np

from .mesh import TriangleMesh

_T = (1.0 + np.sqrt(5.0)) / 2.0

ICOSAHEDRON_VERTICES = np.array([
    (-1, _T, 0), (1, _T, 0), (-1, -_T, 0), (1, -_T, 0),
    (0, -1, _T), (0, 1, _T), (0, -1, -_T), (0, 1, -_T),
    (_T, 0, -1), (_T, 0, 1), (-_T, 0, -1), (-_T, 0, 1),
]) / np.sqrt(1.0 + _T**2)

ICOSAHEDRON_FACES = np.array([
    (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
    (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
    (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
    (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
])


def icosahedron():
    """Regular icosahedron inscribed in the unit sphere, outward oriented."""
    return TriangleMesh(ICOSAHEDRON_VERTICES, ICOSAHEDRON_FACES)


def tetrahedron():
    v = np.array([(1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1)]) / np.sqrt(3.0)
    f = np.array([(0, 1, 2), (0, 2, 3), (0, 3, 1), (1, 3, 2)])
    return TriangleMesh(v, f)


def geodesic_sphere(frequency):
    """Icosahedron with every face split into ``frequency**2`` triangles,
    projected to the unit sphere. ``20 * frequency**2`` faces."""
    n = int(frequency)
    if n < 1:
        raise ValueError("frequency must be >= 1")
    keys = {}
    faces = []

    def vid(A, B, C, i, j):
        key = tuple(sorted((v, w) for v, w in ((A, n - i - j), (B, i), (C, j)) if w))
        k = keys.get(key)
        if k is None:
            k = keys[key] = len(keys)
        return k

    for A, B, C in ICOSAHEDRON_FACES:
        for j in range(n):
            for i in range(n - j):
                p, q, r = vid(A, B, C, i, j), vid(A, B, C, i + 1, j), vid(A, B, C, i, j + 1)
                faces.append((p, q, r))
                if i + j + 2 <= n:
                    s = vid(A, B, C, i + 1, j + 1)
                    faces.append((q, s, r))
    verts = np.zeros((len(keys), 3))
    for key, k in keys.items():
        for v, w in key:
            verts[k] += w * ICOSAHEDRON_VERTICES[v]
    verts /= np.linalg.norm(verts, axis=1)[:, None]
    return TriangleMesh(verts, np.array(faces))


def icosphere(level):
    """Geodesic sphere with ``20 * 4**level`` faces (level 4 has 5120)."""
    return geodesic_sphere(2 ** int(level))


def sphere_with_faces(n_faces):
    """Geodesic sphere with the smallest face count >= ``n_faces``."""
    return geodesic_sphere(int(np.ceil(np.sqrt(n_faces / 20.0))))


def ellipsoid(axes=(2.0, 1.0, 1.0), frequency=32):
    """Geodesic sphere stretched by ``axes``; frequency 32 gives 20480 faces."""
    m = geodesic_sphere(frequency)
    return m.with_vertices(m.vertices * np.asarray(axes, dtype=float))


def ridge_ellipsoid(axes=(2.0, 1.0, 1.0), frequency=32, height=0.35, width=0.12, length=1.2):
    """Ellipsoid with a sharp ridge running along the x-axis on its top.

    Vertices with ``z > 0`` are lifted by
    ``height * exp(-(y / width)**2) * cos(pi x / (2 length))**2`` for
    ``|x| < length``.
    """
    m = ellipsoid(axes, frequency)
    v = m.vertices.copy()
    x, y, z = v.T
    win = np.where(np.abs(x) < length, np.cos(np.pi * x / (2 * length)) ** 2, 0.0)
    bump = height * np.exp(-((y / width) ** 2)) * win
    v[:, 2] = np.where(z > 0, z + bump * np.clip(z / axes[2], 0, 1), z)
    return m.with_vertices(v)


def ridge_region(mesh, width=0.12, length=1.2, extent=0.75):
    """Faces on top of the ridge of :func:`ridge_ellipsoid` plus two vertices
    at its ends (``p1`` at negative x, ``p2`` at positive x)."""
    c = mesh.vertices[mesh.faces].mean(1)
    sel = (c[:, 2] > 0) & (np.abs(c[:, 1]) < 2.0 * width) & (np.abs(c[:, 0]) < extent * length)
    region = np.flatnonzero(sel)
    top = mesh.vertices[:, 2].max()
    ends = [np.array([-extent * length, 0.0, top]), np.array([extent * length, 0.0, top])]
    p1, p2 = (int(np.argmin(np.linalg.norm(mesh.vertices - e, axis=1))) for e in ends)
    return region, p1, p2


def torus(n_major=24, n_minor=12, R=1.0, r=0.35):
    """Closed genus-1 mesh; fails the genus-0 check."""
    u = 2 * np.pi * np.arange(n_major) / n_major
    v = 2 * np.pi * np.arange(n_minor) / n_minor
    U, V = np.meshgrid(u, v, indexing="ij")
    pts = np.column_stack([((R + r * np.cos(V)) * np.cos(U)).ravel(),
                           ((R + r * np.cos(V)) * np.sin(U)).ravel(),
                           (r * np.sin(V)).ravel()])
    faces = []
    for i in range(n_major):
        for j in range(n_minor):
            a = i * n_minor + j
            b = ((i + 1) % n_major) * n_minor + j
            c = ((i + 1) % n_major) * n_minor + (j + 1) % n_minor
            d = i * n_minor + (j + 1) % n_minor
            faces += [(a, b, c), (a, c, d)]
    return TriangleMesh(pts, np.array(faces))
