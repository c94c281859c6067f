import warnings

import numpy as np
import pytest
from scipy.spatial import Delaunay

from qcsphere.param import spherical_conformal_init
from qcsphere.shapes import ellipsoid, icosphere

_ACCEPTANCE = []


def record_acceptance(number, title, passed, detail=""):
    line = f"[acceptance {number:>2}] {'PASS' if passed else 'FAIL'}  {title}"
    if detail:
        line += f"  ({detail})"
    _ACCEPTANCE.append((number, line))
    print(line)


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_ACCEPTANCE):
            terminalreporter.write_line(line)


def disk_mesh(n, seed=0):
    """Delaunay triangulation of ``n`` random points in the unit disk plus a
    ring of boundary points. Returns ``(z, faces, boundary)``."""
    rng = np.random.default_rng(seed)
    m = max(16, int(2 * np.sqrt(n)))
    t = 2 * np.pi * np.arange(m) / m
    r = 0.97 * np.sqrt(rng.random(n))
    a = 2 * np.pi * rng.random(n)
    z = np.concatenate([np.exp(1j * t), r * np.exp(1j * a)])
    faces = Delaunay(np.column_stack([z.real, z.imag])).simplices
    return z, faces, np.arange(m)


@pytest.fixture(scope="session")
def ico4():
    return icosphere(4)


@pytest.fixture(scope="session")
def ico4_init(ico4):
    return spherical_conformal_init(ico4)


@pytest.fixture(scope="session")
def ellipsoid211():
    return ellipsoid((2.0, 1.0, 1.0), 32)


@pytest.fixture(scope="session")
def ellipsoid211_init(ellipsoid211):
    return spherical_conformal_init(ellipsoid211)


@pytest.fixture
def no_warnings():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        yield
