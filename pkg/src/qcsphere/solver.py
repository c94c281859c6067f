"""Finite-element assembly of the generalized Laplacian and Dirichlet solves.

For a Beltrami coefficient ``mu = rho + i*tau`` the map ``u + iv`` with that
coefficient solves ``div(A grad u) = div(A grad v) = 0`` with

    A = [[a1, a2], [a2, a3]],
    a1 = ((rho - 1)**2 + tau**2) / (1 - |mu|**2)
    a2 = -2 tau / (1 - |mu|**2)
    a3 = ((rho + 1)**2 + tau**2) / (1 - |mu|**2)

``det A = 1`` and ``A`` is positive definite whenever ``|mu| < 1``.
"""

import logging
from collections import namedtuple

import numpy as np
import scipy.io
from scipy import sparse
from scipy.sparse import linalg as spla

from .exceptions import DegenerateFaceError, SolverError
from .qc import _gradient_rows, planar_degenerate

logger = logging.getLogger(__name__)

RTOL = 1e-10

AlphaTriple = namedtuple("AlphaTriple", ["a1", "a2", "a3"])


def alpha_coefficients(mu):
    """Coefficients of the symmetric matrix ``A`` for Beltrami coefficient(s) ``mu``."""
    mu = np.asarray(mu, dtype=complex)
    rho, tau = mu.real, mu.imag
    den = 1.0 - rho**2 - tau**2
    if np.any(~(den > 0)):
        raise ValueError("|mu| must be < 1")
    a1 = ((rho - 1.0) ** 2 + tau**2) / den
    a2 = -2.0 * tau / den
    a3 = ((rho + 1.0) ** 2 + tau**2) / den
    if mu.ndim == 0:
        return AlphaTriple(float(a1), float(a2), float(a3))
    return AlphaTriple(a1, a2, a3)


def assemble_generalized_laplacian(z, faces, mu=0.0, excluded=None):
    """Stiffness matrix of ``-div(A grad .)`` with linear elements.

    Parameters
    ----------
    z : array_like of complex, shape (n,)
        Planar vertex positions.
    faces : array_like of int, shape (m, 3)
    mu : complex or array_like of complex, shape (m,)
        Beltrami coefficient per face (a scalar is broadcast).
    excluded : array_like of int, optional
        Faces left out of the assembly (e.g. the outer face).

    Returns
    -------
    scipy.sparse.csr_matrix, shape (n, n)
        Symmetric; with ``mu = 0`` it equals the cotangent Laplacian.
    """
    z = np.asarray(z, dtype=complex)
    faces = np.asarray(faces)
    n, m = len(z), len(faces)
    mu = np.broadcast_to(np.asarray(mu, dtype=complex), (m,))
    keep = np.ones(m, dtype=bool)
    if excluded is not None:
        keep[np.asarray(excluded, dtype=np.int64)] = False
    fk = faces[keep]
    src = z[fk]
    bad = np.flatnonzero(planar_degenerate(src))
    if len(bad):
        f = int(np.flatnonzero(keep)[bad[0]])
        raise DegenerateFaceError(f"planar face {f} is degenerate", face=f)
    a1, a2, a3 = alpha_coefficients(mu[keep])
    Dx, Dy, area = _gradient_rows(src)
    area = np.abs(area)

    rows, cols, vals = [], [], []
    for a in range(3):
        for b in range(a, 3):
            k = area * (a1 * Dx[:, a] * Dx[:, b]
                        + a2 * (Dx[:, a] * Dy[:, b] + Dy[:, a] * Dx[:, b])
                        + a3 * Dy[:, a] * Dy[:, b])
            rows.append(fk[:, a])
            cols.append(fk[:, b])
            vals.append(k)
            if a != b:
                rows.append(fk[:, b])
                cols.append(fk[:, a])
                vals.append(k)
    L = sparse.coo_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                          shape=(n, n)).tocsr()
    # exact symmetry regardless of duplicate summation order
    return ((L + L.T) * 0.5).tocsr()


def _constraints(fixed, values):
    if isinstance(fixed, dict):
        idx = np.fromiter(fixed.keys(), dtype=np.int64, count=len(fixed))
        val = np.array([fixed[i] for i in fixed], dtype=complex)
    else:
        idx = np.atleast_1d(np.asarray(fixed, dtype=np.int64))
        val = np.broadcast_to(np.asarray(values, dtype=complex), idx.shape).copy()
    if len(idx) == 0:
        raise ValueError("at least one Dirichlet constraint is required")
    if len(np.unique(idx)) != len(idx):
        raise ValueError("duplicate constrained vertex")
    return idx, val


def _residual(A, x, b):
    nb = np.linalg.norm(b)
    r = np.linalg.norm(A @ x - b)
    return r / nb if nb > 0 else r


def _solve_direct(A, b):
    lu = spla.splu(A.tocsc(), permc_spec="MMD_AT_PLUS_A")
    return lu.solve(b)


def _solve_cg(A, b, rtol):
    d = A.diagonal()
    if np.any(d <= 0):
        raise SolverError("operator is not positive definite (non-positive diagonal)")
    M = sparse.diags(1.0 / d)
    maxiter = int(10 * np.sqrt(A.shape[0])) + 1000
    x = np.empty_like(b)
    for c in range(b.shape[1]):
        x[:, c], info = spla.cg(A, b[:, c], rtol=rtol, atol=0.0, maxiter=maxiter, M=M)
        if info != 0:
            res = _residual(A, x[:, c], b[:, c])
            raise SolverError(f"conjugate gradient did not converge (residual {res:.3e})",
                              residual=res)
    return x


def solve_dirichlet(L, fixed, values=None, method="direct", rtol=RTOL):
    """Solve ``L u = 0`` on free vertices with ``u = values`` on ``fixed``.

    Real and imaginary parts are solved as two right-hand sides of one
    factorization.

    Parameters
    ----------
    L : sparse matrix, shape (n, n)
        Symmetric operator, e.g. from :func:`assemble_generalized_laplacian`.
    fixed : array_like of int or dict
        Constrained vertices, or a ``{vertex: value}`` mapping.
    values : array_like of complex, optional
        Values for ``fixed`` when it is an index array.
    method : {"direct", "cg"}
        ``"direct"`` falls back to preconditioned CG if the factorization
        fails or misses ``rtol``.

    Raises
    ------
    SolverError
        The reduced system is singular or the residual stays above ``rtol``.
    """
    L = sparse.csr_matrix(L)
    n = L.shape[0]
    idx, val = _constraints(fixed, values)
    if idx.min() < 0 or idx.max() >= n:
        raise ValueError("constrained vertex out of range")
    out = np.zeros(n, dtype=complex)
    out[idx] = val
    free = np.ones(n, dtype=bool)
    free[idx] = False
    if not free.any():
        return out
    Lf = L[free]
    A = Lf[:, free]
    B = Lf[:, idx]
    rhs = -(B @ val)
    b = np.column_stack([rhs.real, rhs.imag])

    x = None
    if method == "direct":
        try:
            x = _solve_direct(A, b)
            res = max(_residual(A, x[:, 0], b[:, 0]), _residual(A, x[:, 1], b[:, 1]))
            if not res <= rtol:
                logger.warning("direct solve residual %.3e above %.1e; retrying with CG", res, rtol)
                x = None
        except (RuntimeError, MemoryError) as exc:
            logger.warning("direct factorization failed (%s); retrying with CG", exc)
    elif method != "cg":
        raise ValueError(f"unknown method {method!r}")
    if x is None:
        x = _solve_cg(A, b, rtol)
        res = max(_residual(A, x[:, 0], b[:, 0]), _residual(A, x[:, 1], b[:, 1]))
        if not res <= rtol:
            raise SolverError(f"solve residual {res:.3e} above {rtol:.1e}", residual=res)
    if not np.all(np.isfinite(x)):
        raise SolverError("solve produced non-finite values")
    out[free] = x[:, 0] + 1j * x[:, 1]
    return out


def dump_matrix(path, L):
    """Write ``L`` in Matrix Market format (debugging aid)."""
    scipy.io.mmwrite(str(path), sparse.coo_matrix(L))
