"""
SpMV kernels, one per storage format, dispatched on the matrix type.

CSR uses the vector layout: workers_per_row lanes share a row, lane l takes
the entries l, l+tw, l+2tw, ... of the row and the lane sums are folded by
a binary tree. ELL and HYB give each row a single lane that walks the
column-major slots in order.
"""

from functools import singledispatch
from typing import Optional, Tuple

import numpy as np

from .grid import blocks_for_length, grid_spmv_blocks, schedule_blocks
from .pool import run_tasks
from ..errors import DimensionMismatch
from ..formats.base import SparseMatrix, VALUE_DTYPE
from ..formats.coo import CooMatrix
from ..formats.csr import CsrMatrix
from ..formats.dense import DenseMatrix, dense_mv
from ..formats.ell import EllMatrix
from ..formats.hyb import HybMatrix
from ..schemas.policy import ExecPolicy, default_policy


def _prepare(m: SparseMatrix, x, out: Optional[np.ndarray]) -> Tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=VALUE_DTYPE)
    if x.ndim != 1 or x.shape[0] != m.n_cols:
        raise DimensionMismatch(f"spmv: x has shape {x.shape}, matrix has {m.n_cols} columns")
    if out is None:
        out = np.zeros(m.n_rows, dtype=VALUE_DTYPE)
    elif out.shape != (m.n_rows,):
        raise DimensionMismatch(f"spmv: out has shape {out.shape}, matrix has {m.n_rows} rows")
    return x, out


def _row_launch(n_rows: int, rows_per_block: int, required: int, policy: ExecPolicy, body, work: int) -> None:
    ranges = schedule_blocks(required, policy)

    def task(block_range: Tuple[int, int]) -> None:
        first, last = block_range
        start = first * rows_per_block
        stop = min(last * rows_per_block, n_rows)
        if start < stop:
            body(start, stop)

    run_tasks(task, ranges, policy.worker_count, work=work)


def tree_reduce_lanes(lane_sums: np.ndarray) -> np.ndarray:
    """Fold (rows, tw) lane sums pairwise: lane i += lane i + width/2 until one lane remains"""
    width = lane_sums.shape[1]
    while width > 1:
        half = width // 2
        lane_sums[:, :half] += lane_sums[:, half:width]
        width = half
    return lane_sums[:, 0]


@singledispatch
def spmv(m: SparseMatrix, x, policy: Optional[ExecPolicy] = None, out: Optional[np.ndarray] = None) -> np.ndarray:
    """y = A x for any supported storage format"""
    raise TypeError(f"no SpMV kernel for {type(m).__name__}")


@spmv.register
def _spmv_csr(m: CsrMatrix, x, policy: Optional[ExecPolicy] = None, out: Optional[np.ndarray] = None) -> np.ndarray:
    x, y = _prepare(m, x, out)
    policy = policy or default_policy()
    lanes_per_row = policy.workers_per_row
    entry_rows = m.entry_rows
    lanes = m.entry_slots % lanes_per_row

    def body(start: int, stop: int) -> None:
        lo, hi = m.row_ptr[start], m.row_ptr[stop]
        products = m.values[lo:hi] * x[m.col_idx[lo:hi]]
        # lane accumulators walk their entries in row order
        keys = (entry_rows[lo:hi] - start) * lanes_per_row + lanes[lo:hi]
        lane_sums = np.bincount(keys, weights=products, minlength=(stop - start) * lanes_per_row)
        y[start:stop] = tree_reduce_lanes(lane_sums.reshape(stop - start, lanes_per_row))

    _row_launch(m.n_rows, policy.rows_per_block, grid_spmv_blocks(m.n_rows, policy), policy, body, m.nnz)
    return y


def _ell_rows(m: EllMatrix, x_ext: np.ndarray, start: int, stop: int) -> np.ndarray:
    acc = np.zeros(stop - start, dtype=VALUE_DTYPE)
    for slot in range(m.width):
        base = slot * m.n_rows
        acc += m.coef[base + start:base + stop] * x_ext[m.jcoef[base + start:base + stop]]
    return acc


def _extend(x: np.ndarray) -> np.ndarray:
    # the padding sentinel n_cols reads a trailing zero
    return np.append(x, 0.0)


@spmv.register
def _spmv_ell(m: EllMatrix, x, policy: Optional[ExecPolicy] = None, out: Optional[np.ndarray] = None) -> np.ndarray:
    x, y = _prepare(m, x, out)
    policy = policy or default_policy()
    x_ext = _extend(x)

    def body(start: int, stop: int) -> None:
        y[start:stop] = _ell_rows(m, x_ext, start, stop)

    required = blocks_for_length(m.n_rows, policy.block_size)
    _row_launch(m.n_rows, policy.block_size, required, policy, body, m.n_rows * m.width)
    return y


def _coo_rows(m: CooMatrix, x: np.ndarray, start: int, stop: int) -> np.ndarray:
    lo, hi = np.searchsorted(m.row_idx, [start, stop])
    products = m.values[lo:hi] * x[m.col_idx[lo:hi]]
    return np.bincount(m.row_idx[lo:hi] - start, weights=products, minlength=stop - start)


@spmv.register
def _spmv_coo(m: CooMatrix, x, policy: Optional[ExecPolicy] = None, out: Optional[np.ndarray] = None) -> np.ndarray:
    x, y = _prepare(m, x, out)
    policy = policy or default_policy()

    def body(start: int, stop: int) -> None:
        y[start:stop] = _coo_rows(m, x, start, stop)

    required = blocks_for_length(m.n_rows, policy.block_size)
    _row_launch(m.n_rows, policy.block_size, required, policy, body, m.nnz)
    return y


@spmv.register
def _spmv_hyb(m: HybMatrix, x, policy: Optional[ExecPolicy] = None, out: Optional[np.ndarray] = None) -> np.ndarray:
    x, y = _prepare(m, x, out)
    policy = policy or default_policy()
    x_ext = _extend(x)

    def body(start: int, stop: int) -> None:
        # overflow rows are scattered after their ELL part, per row batch
        y[start:stop] = _ell_rows(m.ell_part, x_ext, start, stop) + _coo_rows(m.coo_part, x, start, stop)

    required = blocks_for_length(m.n_rows, policy.block_size)
    _row_launch(m.n_rows, policy.block_size, required, policy, body, m.nnz)
    return y


@spmv.register
def _spmv_dense(m: DenseMatrix, x, policy: Optional[ExecPolicy] = None, out: Optional[np.ndarray] = None) -> np.ndarray:
    x, y = _prepare(m, x, out)
    y[:] = dense_mv(m, x)
    return y
