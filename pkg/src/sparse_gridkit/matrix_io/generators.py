"""
Desk-scale test matrices standing in for the large collection matrices.
"""

import logging
from typing import Optional

import scipy.sparse as sp

from .market import write_matrix_market
from ..formats.coo import CooMatrix, coo_from_scipy

logger = logging.getLogger(__name__)

KINDS = ("poisson2d", "laplace1d", "convdiff2d")


def _tridiag(n: int, lower: float, diag: float, upper: float) -> sp.csr_matrix:
    return sp.diags([lower, diag, upper], [-1, 0, 1], shape=(n, n), format="csr")


def laplace1d(n: int) -> CooMatrix:
    """tridiag(-1, 2, -1), n x n"""
    return coo_from_scipy(_tridiag(n, -1.0, 2.0, -1.0))


def poisson2d(n: int) -> CooMatrix:
    """5-point Laplacian on an n x n grid (n^2 unknowns, diagonal 4)"""
    t = _tridiag(n, -1.0, 2.0, -1.0)
    eye = sp.identity(n, format="csr")
    a = (sp.kron(eye, t) + sp.kron(t, eye)).tocsr()
    a.eliminate_zeros()
    return coo_from_scipy(a)


def convdiff2d(n: int, peclet: float = 1.0) -> CooMatrix:
    """Upwind convection-diffusion on an n x n grid.

    Each direction contributes tridiag(-1 - Pe, 2 + Pe, -1), so the matrix is
    nonsymmetric for Pe != 0 and stays a weakly diagonally dominant M-matrix.
    """
    t = _tridiag(n, -1.0 - peclet, 2.0 + peclet, -1.0)
    eye = sp.identity(n, format="csr")
    a = (sp.kron(eye, t) + sp.kron(t, eye)).tocsr()
    a.eliminate_zeros()
    return coo_from_scipy(a)


def build_test_matrix(kind: str, n: int, peclet: float = 1.0) -> CooMatrix:
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if kind == "poisson2d":
        return poisson2d(n)
    if kind == "laplace1d":
        return laplace1d(n)
    if kind == "convdiff2d":
        return convdiff2d(n, peclet)
    raise ValueError(f"unknown matrix kind '{kind}', expected one of {KINDS}")


def generate_test_matrix(kind: str, n: int, out: str, peclet: Optional[float] = None) -> CooMatrix:
    """Build a test matrix and write it as a general Matrix Market file"""
    matrix = build_test_matrix(kind, n, 1.0 if peclet is None else peclet)
    comment = f"{kind} n={n}" + (f" peclet={peclet}" if kind == "convdiff2d" and peclet is not None else "")
    write_matrix_market(matrix, out, comment=comment)
    logger.info("Generated %s (n=%d): %dx%d, nnz %d -> %s", kind, n, matrix.n_rows, matrix.n_cols, matrix.nnz, out)
    return matrix
