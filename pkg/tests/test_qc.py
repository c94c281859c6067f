import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial.transform import Rotation

from qcsphere.exceptions import DegenerateFaceError
from qcsphere.mesh import TriangleMesh
from qcsphere.qc import (beltrami_coefficient, dilation_from_mu, dilation_r3, face_beltrami,
                         inverse_stereographic, inverse_stereographic_south, max_dilation,
                         mu_from_dilation, rotation_to_north, stereographic_north,
                         stereographic_south)

from conftest import disk_mesh


def test_stereographic_examples():
    assert stereographic_north([0, 0, -1]) == 0
    assert stereographic_north([1, 0, 0]) == 1
    assert stereographic_north([0, 1, 0]) == 1j
    np.testing.assert_array_equal(inverse_stereographic(0), [0, 0, -1])
    np.testing.assert_array_equal(inverse_stereographic(1), [1, 0, 0])


def test_north_pole_maps_to_infinity():
    with pytest.raises(ValueError, match="north pole maps to infinity"):
        stereographic_north([0, 0, 1])
    with pytest.raises(ValueError, match="unit sphere"):
        stereographic_north([0, 0, 2])


def test_stereographic_round_trip():
    rng = np.random.default_rng(0)
    z = 1e3 * np.sqrt(rng.random(1000)) * np.exp(2j * np.pi * rng.random(1000))
    p = inverse_stereographic(z)
    np.testing.assert_allclose(np.linalg.norm(p, axis=1), 1, atol=1e-12)
    back = stereographic_north(p)
    assert np.max(np.abs(back - z) / np.maximum(1, np.abs(z))) < 1e-12
    s = inverse_stereographic_south(z[:50])
    np.testing.assert_allclose(stereographic_south(s), z[:50], rtol=1e-12)


def test_rotation_to_north_examples():
    np.testing.assert_array_equal(rotation_to_north([0, 0, 1]), np.eye(3))
    np.testing.assert_array_equal(rotation_to_north([0, 0, -1]), np.diag([1.0, -1.0, -1.0]))
    R = rotation_to_north([1, 0, 0])
    np.testing.assert_allclose(R @ [1, 0, 0], [0, 0, 1], atol=1e-15)
    np.testing.assert_allclose(R.T @ R, np.eye(3), atol=1e-12)
    # minimal angle: the rotation axis (c x north) is fixed
    np.testing.assert_allclose(R @ [0, -1, 0], [0, -1, 0], atol=1e-15)
    with pytest.raises(ValueError):
        rotation_to_north([0, 0, 0])


@settings(max_examples=200, deadline=None)
@given(st.tuples(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1)))
def test_rotation_to_north_is_orthogonal(c):
    c = np.array(c)
    if np.linalg.norm(c) < 1e-6:
        return
    R = rotation_to_north(c)
    np.testing.assert_allclose(R.T @ R, np.eye(3), atol=1e-12)
    assert np.linalg.det(R) == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_allclose(R @ (c / np.linalg.norm(c)), [0, 0, 1], atol=1e-12)


def _affine(z, a, b, c=0):
    return a * z + b * np.conj(z) + c


def test_beltrami_closed_forms():
    z, f, _ = disk_mesh(200)
    assert np.abs(beltrami_coefficient(z, z, f)).max() < 1e-12
    mu = beltrami_coefficient(z, 2 * z.real + 1j * z.imag, f)
    np.testing.assert_allclose(mu, 1 / 3, atol=1e-12)
    mu = beltrami_coefficient(z, (z.real + z.imag) + 1j * z.imag, f)
    np.testing.assert_allclose(mu, (-1 + 2j) / 5, atol=1e-12)
    np.testing.assert_allclose(np.abs(mu), 1 / np.sqrt(5), atol=1e-12)


def test_beltrami_of_general_affine_map():
    z, f, _ = disk_mesh(100, seed=4)
    a, b = 1.3 - 0.4j, 0.2 + 0.5j
    mu = beltrami_coefficient(z, _affine(z, a, b, 3 - 1j), f)
    np.testing.assert_allclose(mu, b / a, atol=1e-12)


def test_beltrami_errors():
    src = np.array([[0, 1, 2]], dtype=complex)
    with pytest.raises(DegenerateFaceError):
        face_beltrami(src, src)
    src = np.array([[0, 1, 1j]])
    tgt = np.array([[0, 1, -1j]])  # pure reflection: f_z = 0
    with pytest.raises(DegenerateFaceError, match="degenerate conformal derivative"):
        face_beltrami(src, tgt)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.1, 10), st.floats(-np.pi, np.pi), st.complex_numbers(max_magnitude=5),
       st.booleans())
def test_mu_modulus_similarity_invariant(scale, angle, shift, on_source):
    z, f, _ = disk_mesh(60, seed=2)
    w = _affine(z, 1.0, 0.3 + 0.2j) + 0.05 * z**2
    base = np.abs(beltrami_coefficient(z, w, f))
    s = scale * np.exp(1j * angle)
    if on_source:
        # a similarity of the source: compose w with its inverse
        out = np.abs(beltrami_coefficient(s * z + shift, w, f))
    else:
        out = np.abs(beltrami_coefficient(z, s * w + shift, f))
    np.testing.assert_allclose(out, base, atol=1e-12)


def test_dilation_from_mu_examples():
    assert dilation_from_mu(0) == 1
    assert dilation_from_mu(1 / 3) == pytest.approx(2, abs=1e-15)
    assert dilation_from_mu(0.6j) == pytest.approx(4, abs=1e-14)
    with pytest.raises(ValueError):
        dilation_from_mu(1.0)


def test_mu_from_dilation_examples():
    assert mu_from_dilation(1) == 0
    assert mu_from_dilation(4) == pytest.approx(0.6, abs=1e-15)
    assert mu_from_dilation(2.5) == pytest.approx(3 / 7, abs=1e-15)
    assert mu_from_dilation(1e9) == 1 - 1e-3
    with pytest.raises(ValueError):
        mu_from_dilation(0.99)


def test_dilation_round_trip():
    K = np.concatenate([[1.0], np.linspace(1, 499.99, 5000)])
    np.testing.assert_allclose(dilation_from_mu(mu_from_dilation(K)), K, rtol=1e-12)


def test_max_dilation():
    assert max_dilation(np.full(10, 3.0)) == 3
    assert max_dilation([1, 2, 4]) == 4
    assert max_dilation(dilation_from_mu(np.array([0.1, 1 / 3, -0.2j]))) == pytest.approx(2)
    with pytest.raises(ValueError):
        max_dilation([])


def _grid(n=6):
    x, y = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    v = np.column_stack([x.ravel(), y.ravel(), np.zeros(n * n)]).astype(float)
    f = []
    for i in range(n - 1):
        for j in range(n - 1):
            a, b, c, d = i * n + j, (i + 1) * n + j, (i + 1) * n + j + 1, i * n + j + 1
            f += [(a, b, c), (a, c, d)]
    return TriangleMesh(v, f)


def test_dilation_r3_examples():
    g = _grid()
    R = Rotation.from_euler("zyx", [0.4, 1.0, -0.3]).as_matrix()
    np.testing.assert_allclose(dilation_r3(g, g.with_vertices(g.vertices @ R.T + 5)), 1, atol=1e-12)
    np.testing.assert_allclose(dilation_r3(g, g.with_vertices(2 * g.vertices)), 1, atol=1e-12)
    v = g.vertices.copy()
    v[:, 0] *= 2
    np.testing.assert_allclose(dilation_r3(g, g.with_vertices(v)), 2, atol=1e-12)
    with pytest.raises(ValueError, match="connectivity"):
        dilation_r3(g, TriangleMesh(g.vertices, g.faces[::-1]))


def test_composition_with_similarity_keeps_max_dilation():
    z, f, _ = disk_mesh(300, seed=8)
    w = z + 0.3 * np.conj(z) ** 2 + 0.1 * z * np.abs(z)
    K1 = dilation_from_mu(beltrami_coefficient(z, w, f))
    K2 = dilation_from_mu(beltrami_coefficient(z, (0.3 - 2j) * w + 7, f))
    assert abs(K2.max() - K1.max()) < 1e-12


@settings(max_examples=50, deadline=None)
@given(st.complex_numbers(max_magnitude=0.9), st.complex_numbers(max_magnitude=0.9))
def test_composition_bound(m1, m2):
    z, f, _ = disk_mesh(80, seed=5)
    w1 = z + m1 * np.conj(z) + 0.05 * z**2  # piecewise-affine after sampling
    w2 = w1 + m2 * np.conj(w1)
    Kf = dilation_from_mu(beltrami_coefficient(z, w1, f))
    Kg = dilation_from_mu(beltrami_coefficient(w1, w2, f))
    Kgf = dilation_from_mu(beltrami_coefficient(z, w2, f))
    assert np.all(Kgf <= Kf * Kg + 1e-9)
