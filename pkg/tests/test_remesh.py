import numpy as np
import pytest

from qcsphere.exceptions import NonManifoldError, StageError
from qcsphere.mesh import TriangleMesh, validate_genus0
from qcsphere.param import fsqc_parameterize, spherical_conformal_init
from qcsphere.remesh import (RegionSpec, build_dilation_field, empty_cap_violations,
                             induced_triangulation, read_region_spec, remesh_pipeline,
                             spherical_delaunay, triangle_quality, write_region_spec)
from qcsphere.shapes import icosahedron, icosphere, ridge_ellipsoid, ridge_region, tetrahedron


def _random_sphere(n, seed):
    p = np.random.default_rng(seed).normal(size=(n, 3))
    return p / np.linalg.norm(p, axis=1)[:, None]


def _canonical(faces):
    f = np.asarray(faces)
    r = np.argmin(f, axis=1)
    f = np.stack([f[np.arange(len(f)), (r + k) % 3] for k in range(3)], axis=1)
    return f[np.lexsort(f.T[::-1])]


# region spec and dilation field

def test_region_spec_validation():
    with pytest.raises(ValueError, match="K must be >= 1"):
        RegionSpec([1, 2], 0.5, 0, 1)
    with pytest.raises(ValueError, match="p1 and p2 must differ"):
        RegionSpec([1, 2], 2.0, 4, 4)
    with pytest.raises(ValueError, match="unique"):
        RegionSpec([1, 1], 2.0, 0, 1)
    with pytest.raises(ValueError, match="out of range"):
        RegionSpec([50], 2.0, 0, 1).check(icosahedron())


def test_region_spec_file_round_trip(tmp_path):
    (tmp_path / "faces.txt").write_text("3\n1\n")
    spec = RegionSpec([3, 1], 2.5, 0, 7)
    write_region_spec(tmp_path / "r.spec", spec, "faces.txt")
    back = read_region_spec(tmp_path / "r.spec")
    np.testing.assert_array_equal(back.region, [1, 3])
    assert (back.k_region, back.p1, back.p2) == (2.5, 0, 7)


def test_region_spec_file_errors(tmp_path):
    p = tmp_path / "r.spec"
    p.write_text("k = 2\np1 = 1\n")
    with pytest.raises(ValueError, match="missing keys p2"):
        read_region_spec(p)
    p.write_text("k 2\n")
    with pytest.raises(ValueError, match="key = value"):
        read_region_spec(p)
    p.write_text("# empty region\nk = 1.5\np1 = 1\np2 = 1\n")
    with pytest.raises(ValueError, match="p1 and p2 must differ"):
        read_region_spec(p)


def test_build_dilation_field():
    m = icosahedron()
    np.testing.assert_array_equal(build_dilation_field(m, RegionSpec([], 3.0, 0, 1)), 1.0)
    K = build_dilation_field(m, RegionSpec([2, 5], 2.5, 0, 1))
    assert K[2] == K[5] == 2.5
    assert np.sum(K == 1.0) == 18


# spherical Delaunay

def test_delaunay_of_platonic_solids():
    assert len(spherical_delaunay(tetrahedron().vertices)) == 4
    octa = np.array([[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1.0]])
    f = spherical_delaunay(octa)
    assert len(f) == 8
    assert validate_genus0(TriangleMesh(octa, f)).passed


@pytest.mark.parametrize("n,seed", [(200, 0), (1000, 1), (5000, 2)])
def test_delaunay_empty_caps(n, seed):
    p = _random_sphere(n, seed)
    f = spherical_delaunay(p)
    assert len(f) == 2 * n - 4
    assert len(empty_cap_violations(p, f)) == 0
    m = TriangleMesh(p, f)
    assert validate_genus0(m).passed
    assert m.signed_volume() > 0


def test_empty_cap_check_detects_a_bad_face():
    p = _random_sphere(50, 3)
    f = spherical_delaunay(p)
    # flip the shared edge of two adjacent faces: the result is not Delaunay
    a, b = f[0], None
    for g in f[1:]:
        if len(set(a) & set(g)) == 2:
            b = g
            break
    shared = list(set(a) & set(b))
    u, v = [x for x in a if x not in shared][0], [x for x in b if x not in shared][0]
    bad = np.array([[u, v, shared[0]], [v, u, shared[1]]])
    assert len(empty_cap_violations(p, bad)) > 0


def test_delaunay_errors():
    with pytest.raises(ValueError, match="at least 4"):
        spherical_delaunay(tetrahedron().vertices[:3])
    ring = np.exp(2j * np.pi * np.arange(8) / 8)
    with pytest.raises(ValueError, match="degenerate"):
        spherical_delaunay(np.column_stack([ring.real, ring.imag, np.zeros(8)]))
    with pytest.raises(ValueError, match="unit sphere"):
        spherical_delaunay(2 * tetrahedron().vertices)
    dup = np.vstack([icosahedron().vertices, icosahedron().vertices[:1]])
    with pytest.raises(ValueError, match="not hull vertices"):
        spherical_delaunay(dup)


# induced triangulation

def test_induced_triangulation_identity_case():
    ico = icosahedron()
    res = induced_triangulation(ico, spherical_delaunay(ico.vertices))
    np.testing.assert_array_equal(_canonical(res.mesh.faces), _canonical(ico.faces))
    np.testing.assert_allclose(res.min_angle, np.pi / 3, atol=1e-12)
    np.testing.assert_allclose(res.aspect_ratio, np.sqrt(3), rtol=1e-12)


def test_induced_triangulation_fixes_orientation():
    ico = icosahedron()
    res = induced_triangulation(ico, ico.faces[:, ::-1])
    assert res.mesh.signed_volume() > 0
    np.testing.assert_array_equal(res.mesh.vertices, ico.vertices)


def test_induced_triangulation_rejects_non_manifold():
    ico = icosahedron()
    with pytest.raises(NonManifoldError) as exc:
        induced_triangulation(ico, np.vstack([ico.faces, ico.faces[:1]]))
    assert not exc.value.report.passed


def test_triangle_quality_values():
    v = np.array([[0, 0, 0], [2, 0, 0], [0, 1, 0], [1, 1, 0]], dtype=float)
    ang, asp = triangle_quality(v, np.array([[0, 1, 2]]))
    # right triangle with legs 2 and 1
    assert ang[0] == pytest.approx(np.arctan(0.5))
    r = 0.5 * (2 + 1 - np.sqrt(5))
    assert asp[0] == pytest.approx(np.sqrt(5) / (2 * r))


def test_induced_from_conformal_parameterization():
    m = icosphere(3)
    sph = fsqc_parameterize(m, 1.0)
    res = induced_triangulation(m, spherical_delaunay(sph.points))
    assert validate_genus0(res.mesh).passed
    assert res.mesh.n_vertices == m.n_vertices
    np.testing.assert_array_equal(res.mesh.vertices, m.vertices)


# pipeline

@pytest.fixture(scope="module")
def ridge():
    m = ridge_ellipsoid(frequency=24)
    region, p1, p2 = ridge_region(m)
    return m, region, p1, p2, spherical_conformal_init(m)


def test_empty_region_equals_conformal_delaunay(ridge):
    m, _, p1, p2, init = ridge
    res = remesh_pipeline(m, RegionSpec([], 2.5, p1, p2), init=init)
    ref = spherical_delaunay(fsqc_parameterize(m, 1.0, init=init).points)
    np.testing.assert_array_equal(_canonical(res.mesh.faces), _canonical(ref))


def test_empty_region_keeps_min_angles():
    m = icosphere(3)
    res = remesh_pipeline(m, RegionSpec([], 1.0, 0, 1))
    a0 = triangle_quality(m.vertices, m.faces)[0].mean()
    assert abs(res.min_angle.mean() / a0 - 1) < 0.10
    assert validate_genus0(res.mesh).passed


def test_region_stretch_is_across_p1_p2(ridge):
    m, region, p1, p2, init = ridge
    base = remesh_pipeline(m, RegionSpec([], 1.0, p1, p2), init=init)
    res = remesh_pipeline(m, RegionSpec(region, 2.5, p1, p2), init=init)
    inside = np.zeros(m.n_vertices, dtype=bool)
    inside[np.unique(m.faces[region])] = True
    axis = m.vertices[p2] - m.vertices[p1]
    axis /= np.linalg.norm(axis)

    def along_over_across(r):
        f = r.mesh.faces[r.region_faces(inside)]
        v = m.vertices[f]
        c = v - v.mean(1, keepdims=True)
        n = np.cross(v[:, 1] - v[:, 0], v[:, 2] - v[:, 0])
        n /= np.linalg.norm(n, axis=1)[:, None]
        t1 = axis - n * (n @ axis)[:, None]
        t1 /= np.linalg.norm(t1, axis=1)[:, None]
        t2 = np.cross(n, t1)
        a = np.sqrt((np.einsum("fkj,fj->fk", c, t1) ** 2).sum(1))
        b = np.sqrt((np.einsum("fkj,fj->fk", c, t2) ** 2).sum(1))
        return np.median(a / b)

    # the map stretches along p1 -> p2, so pulled-back triangles shrink along it
    assert along_over_across(res) < along_over_across(base) / 1.3
    assert res.sphere.report.flips == 0


def test_pipeline_errors(ridge):
    m, region, p1, p2, init = ridge
    with pytest.raises(StageError) as exc:
        remesh_pipeline(m, RegionSpec([m.n_faces + 3], 2.0, p1, p2), init=init)
    assert exc.value.stage == "dilation field"
    with pytest.raises(ValueError, match="p1 and p2 must differ"):
        RegionSpec(region, 2.5, p1, p1)
