import os

import numpy as np
import pytest

from src.sparse_gridkit.config import MATRIX_DIR
from src.sparse_gridkit.formats import CooMatrix, build_coo, coo_to_csr
from src.sparse_gridkit.schemas import ExecPolicy, GridStrategy

# 5x5 nonsymmetric sample, 0-based
WORKED_ROWS = [0, 0, 1, 1, 2, 2, 3, 3, 3, 4, 4]
WORKED_COLS = [0, 1, 1, 2, 0, 2, 1, 3, 4, 2, 4]
WORKED_VALUES = [-5.0, 14.0, 8.0, 1.0, 2.0, 10.0, 4.0, 2.0, 9.0, 15.0, 7.0]

WORKED_DENSE = np.array([
    [-5.0, 14.0, 0.0, 0.0, 0.0],
    [0.0, 8.0, 1.0, 0.0, 0.0],
    [2.0, 0.0, 10.0, 0.0, 0.0],
    [0.0, 4.0, 0.0, 2.0, 9.0],
    [0.0, 0.0, 15.0, 0.0, 7.0],
])

# a spread of execution policies used by the kernel tests
SAMPLE_POLICIES = [
    ExecPolicy(block_size=bs, workers_per_row=tw, grid_strategy=gs, worker_count=wc)
    for bs, tw, gs, wc in [
        (32, 1, GridStrategy.FLAT_X, 1),
        (32, 32, GridStrategy.SQUARE, 4),
        (64, 8, GridStrategy.FLAT_X, 2),
        (64, 2, GridStrategy.SQUARE, 1),
        (128, 4, GridStrategy.FLAT_X, 3),
        (128, 16, GridStrategy.SQUARE, 2),
        (256, 8, GridStrategy.FLAT_X, 4),
        (256, 1, GridStrategy.SQUARE, 8),
        (512, 32, GridStrategy.FLAT_X, 1),
        (512, 4, GridStrategy.SQUARE, 4),
        (1024, 8, GridStrategy.FLAT_X, 2),
        (1024, 16, GridStrategy.SQUARE, 1),
    ]
]


@pytest.fixture
def worked() -> CooMatrix:
    triples = list(zip(WORKED_ROWS, WORKED_COLS, WORKED_VALUES))
    # shuffled input order must not matter
    triples = triples[::-1]
    return build_coo(triples, 5, 5)


@pytest.fixture
def worked_csr(worked):
    return coo_to_csr(worked)


def random_coo(rng: np.random.Generator, n_rows: int, n_cols: int, density: float, scale: float = 1e3) -> CooMatrix:
    count = int(round(density * n_rows * n_cols))
    rows = rng.integers(0, n_rows, count) if n_rows else np.empty(0, dtype=int)
    cols = rng.integers(0, n_cols, count) if n_cols else np.empty(0, dtype=int)
    values = rng.uniform(-scale, scale, count)
    return CooMatrix(n_rows, n_cols, rows, cols, values)


def tridiagonal(n: int, diag: float = 2.0, off: float = -1.0) -> CooMatrix:
    triples = [(i, i, diag) for i in range(n)]
    triples += [(i, i + 1, off) for i in range(n - 1)]
    triples += [(i + 1, i, off) for i in range(n - 1)]
    return build_coo(triples, n, n)


def collection_matrix(name: str) -> str:
    """Path of a downloaded collection matrix, or skip the test"""
    path = os.path.join(MATRIX_DIR, f"{name}.mtx")
    if not os.path.exists(path):
        pytest.skip(f"{path} not downloaded (python -m evals.fetch_matrices)")
    return path
