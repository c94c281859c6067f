"""Triangle mesh container, topology checks and per-face geometry.

Faces are stored as an ``(m, 3)`` integer array of 0-based vertex indices.
Half-edge ``3*f + k`` of face ``f`` runs from ``faces[f, k]`` to
``faces[f, (k+1) % 3]`` and its opposite corner is ``faces[f, (k+2) % 3]``.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from .exceptions import DegenerateFaceError

# face area below AREA_TOL * (bounding-box diagonal)**2 counts as degenerate
AREA_TOL = 1e-12
TIE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class TriangleMesh:
    """Immutable triangle mesh.

    Parameters
    ----------
    vertices : array_like, shape (n, 3)
        Vertex positions. 2D input is padded with ``z = 0``.
    faces : array_like, shape (m, 3)
        Vertex index triples, consistently oriented.
    """

    vertices: np.ndarray
    faces: np.ndarray

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        t = np.array(self.faces, dtype=np.int64)
        if v.ndim != 2 or v.shape[1] not in (2, 3):
            raise ValueError("vertices must have shape (n, 3)")
        if v.shape[1] == 2:
            v = np.column_stack([v, np.zeros(len(v))])
        if t.size == 0:
            t = t.reshape(0, 3)
        if t.ndim != 2 or t.shape[1] != 3:
            raise ValueError("faces must be index triples")
        if t.size and (t.min() < 0 or t.max() >= len(v)):
            bad = int(np.flatnonzero((t < 0).any(1) | (t >= len(v)).any(1))[0])
            raise ValueError(f"face {bad} has a vertex index out of range")
        v.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "faces", t)

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_faces(self):
        return len(self.faces)

    @property
    def n_edges(self):
        return len(edges(self.faces))

    def euler_characteristic(self):
        return self.n_vertices - self.n_edges + self.n_faces

    def with_vertices(self, vertices):
        """Same connectivity, new positions."""
        return TriangleMesh(vertices, self.faces)

    def bbox_diagonal(self):
        if self.n_vertices == 0:
            return 0.0
        return float(np.linalg.norm(self.vertices.max(0) - self.vertices.min(0)))

    def face_areas(self):
        return face_areas(self.vertices, self.faces)

    def face_normals(self):
        """Unnormalised normals (length = twice the face area)."""
        p = self.vertices[self.faces]
        return np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0])

    def signed_volume(self):
        p = self.vertices[self.faces]
        return float(np.einsum("ij,ij->i", p[:, 0], np.cross(p[:, 1], p[:, 2])).sum() / 6.0)


@dataclass
class ValidationReport:
    """Result of :func:`validate_genus0`. ``passed`` is True when no problem was found."""

    n_vertices: int
    n_edges: int
    n_faces: int
    euler: int
    problems: list = field(default_factory=list)

    @property
    def passed(self):
        return not self.problems

    def __str__(self):
        head = f"V={self.n_vertices} E={self.n_edges} F={self.n_faces} chi={self.euler}"
        if self.passed:
            return head + ": ok"
        return head + ": " + "; ".join(self.problems)


@dataclass(frozen=True, eq=False)
class EdgeWeightField:
    """Per undirected edge weights; ``edges`` rows are sorted ``(u, v)`` with u < v."""

    edges: np.ndarray
    weights: np.ndarray

    def weight(self, u, v):
        u, v = min(u, v), max(u, v)
        i = np.searchsorted(self.edges[:, 0], u, side="left")
        j = np.searchsorted(self.edges[:, 0], u, side="right")
        k = np.flatnonzero(self.edges[i:j, 1] == v)
        if len(k) == 0:
            raise KeyError(f"({u}, {v}) is not an edge")
        return float(self.weights[i + k[0]])


def halfedges(faces):
    """Directed edges ``(m*3, 2)``, half-edge ``3*f + k`` first."""
    faces = np.asarray(faces)
    return faces[:, [0, 1, 1, 2, 2, 0]].reshape(-1, 2)


def edges(faces, return_inverse=False, return_counts=False):
    """Unique undirected edges as sorted pairs, lexicographically ordered."""
    he = np.sort(halfedges(faces), axis=1)
    return np.unique(he, axis=0, return_inverse=return_inverse,
                     return_counts=return_counts)


def face_adjacency(faces):
    """Pairs ``(f, g)`` with f < g of faces sharing at least one edge."""
    faces = np.asarray(faces)
    und, inv, cnt = edges(faces, return_inverse=True, return_counts=True)
    inv = inv.ravel()
    owner = np.repeat(np.arange(len(faces)), 3)
    order = np.argsort(inv, kind="stable")
    inv_s, own_s = inv[order], owner[order]
    # only edges with exactly two incident faces give a well-defined pair
    starts = np.flatnonzero(np.r_[True, inv_s[1:] != inv_s[:-1]])
    two = cnt[inv_s[starts]] == 2
    a = own_s[starts[two]]
    b = own_s[starts[two] + 1]
    pairs = np.column_stack([np.minimum(a, b), np.maximum(a, b)])
    pairs = pairs[pairs[:, 0] != pairs[:, 1]]
    return np.unique(pairs, axis=0)


def face_areas(vertices, faces):
    p = np.asarray(vertices)[faces]
    if p.shape[-1] == 2:
        e1, e2 = p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]
        return 0.5 * np.abs(e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])
    return 0.5 * np.linalg.norm(np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]), axis=1)


def degenerate_faces(vertices, faces, tol=AREA_TOL):
    """Indices of faces with area below ``tol * diag**2``."""
    vertices = np.asarray(vertices, dtype=float)
    if len(faces) == 0:
        return np.zeros(0, dtype=np.int64)
    diag = np.linalg.norm(vertices.max(0) - vertices.min(0))
    return np.flatnonzero(face_areas(vertices, faces) < tol * diag**2)


def validate_genus0(mesh):
    """Check that ``mesh`` is a closed, oriented, genus-0 2-manifold.

    Every violated condition is listed in the returned report; nothing is
    raised.
    """
    faces = mesh.faces
    und, cnt = edges(faces, return_counts=True)
    chi = mesh.n_vertices - len(und) + mesh.n_faces
    report = ValidationReport(mesh.n_vertices, len(und), mesh.n_faces, int(chi))
    if mesh.n_faces == 0:
        report.problems.append("mesh has no faces")
        return report

    same = (faces[:, 0] == faces[:, 1]) | (faces[:, 1] == faces[:, 2]) | (faces[:, 2] == faces[:, 0])
    if same.any():
        report.problems.append(f"{int(same.sum())} faces repeat a vertex")
    n_open = int((cnt == 1).sum())
    if n_open:
        report.problems.append(f"open boundary: {n_open} boundary edges")
    n_nm = int((cnt > 2).sum())
    if n_nm:
        report.problems.append(f"non-manifold: {n_nm} edges shared by more than two faces")
    _, dcnt = np.unique(halfedges(faces), axis=0, return_counts=True)
    n_dup = int((dcnt > 1).sum())
    if n_dup:
        report.problems.append(f"inconsistent orientation: {n_dup} directed edges repeated")
    unused = mesh.n_vertices - len(np.unique(faces))
    if unused:
        report.problems.append(f"{unused} unreferenced vertices")
    if chi != 2:
        report.problems.append(f"Euler characteristic {chi}")
    bad = degenerate_faces(mesh.vertices, faces)
    if len(bad):
        report.problems.append(f"{len(bad)} degenerate faces (first: face {bad[0]})")
    return report


def _check_degenerate(vertices, faces):
    bad = degenerate_faces(vertices, faces)
    if len(bad):
        raise DegenerateFaceError(f"face {bad[0]} is degenerate (area below tolerance)",
                                  face=int(bad[0]))


def corner_cotangents(vertices, faces):
    """Cotangent of the interior angle at each face corner, shape ``(m, 3)``.

    Works for 2D or 3D positions. The cotangent at corner ``k`` belongs to
    the opposite edge ``(faces[:, k+1], faces[:, k+2])``.
    """
    p = np.asarray(vertices, dtype=float)[faces]
    if p.shape[-1] == 2:
        p = np.concatenate([p, np.zeros(p.shape[:2] + (1,))], axis=2)
    cots = np.empty(p.shape[:2])
    for k in range(3):
        a = p[:, (k + 1) % 3] - p[:, k]
        b = p[:, (k + 2) % 3] - p[:, k]
        cots[:, k] = np.einsum("ij,ij->i", a, b) / np.linalg.norm(np.cross(a, b), axis=1)
    return cots


def corner_angles(vertices, faces):
    """Interior angles (radians) at each face corner, shape ``(m, 3)``."""
    p = np.asarray(vertices, dtype=float)[faces]
    ang = np.empty(p.shape[:2])
    for k in range(3):
        a = p[:, (k + 1) % 3] - p[:, k]
        b = p[:, (k + 2) % 3] - p[:, k]
        if p.shape[-1] == 2:
            cr = np.abs(a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0])
        else:
            cr = np.linalg.norm(np.cross(a, b), axis=1)
        ang[:, k] = np.arctan2(cr, np.einsum("ij,ij->i", a, b))
    return ang


def cotangent_weights(mesh):
    """Edge weights ``k_uv = cot(alpha) + cot(beta)`` from the 3D geometry.

    Boundary edges (open meshes) receive the single available cotangent.
    Negative weights are kept.

    Raises
    ------
    DegenerateFaceError
        If a face area is below tolerance; the face index is attached.
    """
    _check_degenerate(mesh.vertices, mesh.faces)
    cots = corner_cotangents(mesh.vertices, mesh.faces)
    und, inv = edges(mesh.faces, return_inverse=True)
    # half-edge 3f+k is opposite to corner (k+2) % 3
    opp = cots[:, [2, 0, 1]].ravel()
    w = np.bincount(inv.ravel(), weights=opp, minlength=len(und))
    return EdgeWeightField(und, w)


def cotangent_laplacian(vertices, faces):
    """Cotangent stiffness matrix ``L`` (positive semidefinite).

    ``L[u, v] = -(cot a + cot b) / 2`` for every edge and the diagonal holds
    the negated row sums, so ``x @ L @ x`` is the Dirichlet energy of the
    piecewise-linear interpolant. ``vertices`` may be 2D, 3D or complex.
    """
    vertices = np.asarray(vertices)
    if np.iscomplexobj(vertices):
        vertices = np.column_stack([vertices.real, vertices.imag])
    faces = np.asarray(faces)
    n = len(vertices)
    cots = corner_cotangents(vertices, faces)
    i = np.concatenate([faces[:, 1], faces[:, 2], faces[:, 0]])
    j = np.concatenate([faces[:, 2], faces[:, 0], faces[:, 1]])
    w = -0.5 * cots.T.ravel()
    off = sparse.coo_matrix((np.r_[w, w], (np.r_[i, j], np.r_[j, i])), shape=(n, n)).tocsr()
    diag = -np.asarray(off.sum(axis=1)).ravel()
    return (off + sparse.diags(diag)).tocsr()


def regularity_scores(vertices, faces):
    """Per-face score: squared deviation of the face's own angles from pi/3
    plus the same quantity summed over its edge-adjacent faces."""
    own = ((corner_angles(vertices, faces) - np.pi / 3) ** 2).sum(axis=1)
    total = own.copy()
    pairs = face_adjacency(faces)
    np.add.at(total, pairs[:, 0], own[pairs[:, 1]])
    np.add.at(total, pairs[:, 1], own[pairs[:, 0]])
    return total


def most_regular_face(mesh, tie_tol=TIE_TOL):
    """Index of the face whose 1-ring is closest to equilateral.

    Scores within ``tie_tol`` of the minimum are treated as ties and the
    lowest index wins.
    """
    s = regularity_scores(mesh.vertices, mesh.faces)
    return int(np.flatnonzero(s <= s.min() + tie_tol)[0])


def isometric_embedding(vertices, faces):
    """Embed every face isometrically into the complex plane.

    Corner 0 goes to 0, corner 1 to the positive real axis and corner 2 to
    the upper half-plane. Returns an ``(m, 3)`` complex array.
    """
    p = np.asarray(vertices, dtype=float)[np.asarray(faces)]
    if p.shape[-1] == 2:
        p = np.concatenate([p, np.zeros(p.shape[:2] + (1,))], axis=2)
    a = p[:, 1] - p[:, 0]
    b = p[:, 2] - p[:, 0]
    la = np.linalg.norm(a, axis=1)
    cr = np.linalg.norm(np.cross(a, b), axis=1)
    diag = np.linalg.norm(p.max(1) - p.min(1), axis=1)
    bad = np.flatnonzero(0.5 * cr < AREA_TOL * diag**2)
    if len(bad):
        raise DegenerateFaceError(f"face {bad[0]} is degenerate; cannot embed",
                                  face=int(bad[0]))
    x = np.einsum("ij,ij->i", a, b) / la
    y = cr / la
    out = np.zeros((len(p), 3), dtype=complex)
    out[:, 1] = la
    out[:, 2] = x + 1j * y
    return out


def isometric_face_embedding(p1, p2, p3):
    """Complex coordinates ``(0, |p2 - p1|, x + iy)`` with ``y > 0`` of one triangle."""
    return isometric_embedding(np.array([p1, p2, p3], dtype=float), np.array([[0, 1, 2]]))[0]
