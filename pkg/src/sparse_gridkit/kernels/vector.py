"""
BLAS-1 kernels run over block_size chunks of the worker pool.

Every kernel computes exactly the same floating-point operations for a given
block_size whatever the number of workers, so results are reproducible.
"""

from typing import Callable, Optional, Tuple

import numpy as np

from .grid import blocks_for_length, schedule_blocks
from .pool import run_tasks
from ..errors import DimensionMismatch
from ..formats.base import VALUE_DTYPE
from ..schemas.policy import ExecPolicy, default_policy


def _check_lengths(x: np.ndarray, y: np.ndarray, op: str) -> int:
    if x.shape != y.shape:
        raise DimensionMismatch(f"{op}: vector lengths differ ({x.shape[0]} vs {y.shape[0]})")
    return x.shape[0]


def _launch(n: int, policy: ExecPolicy, body: Callable[[int, int], None]) -> None:
    """Map body(start, stop) over element ranges derived from the block schedule"""
    block_size = policy.block_size
    ranges = schedule_blocks(blocks_for_length(n, block_size), policy)

    def task(block_range: Tuple[int, int]) -> None:
        first, last = block_range
        body(first * block_size, min(last * block_size, n))

    run_tasks(task, ranges, policy.worker_count, work=n)


def daxpy(alpha: float, x: np.ndarray, y: np.ndarray, policy: Optional[ExecPolicy] = None) -> None:
    """y <- alpha*x + y"""
    n = _check_lengths(x, y, "daxpy")
    policy = policy or default_policy()

    def body(start: int, stop: int) -> None:
        y[start:stop] += alpha * x[start:stop]

    _launch(n, policy, body)


def xpay(x: np.ndarray, beta: float, y: np.ndarray, policy: Optional[ExecPolicy] = None) -> None:
    """y <- x + beta*y (the search-direction update)"""
    n = _check_lengths(x, y, "xpay")
    policy = policy or default_policy()

    def body(start: int, stop: int) -> None:
        y[start:stop] *= beta
        y[start:stop] += x[start:stop]

    _launch(n, policy, body)


def scal_elementwise(a: np.ndarray, b: np.ndarray, policy: Optional[ExecPolicy] = None) -> None:
    """a[i] <- a[i] * b[i]"""
    n = _check_lengths(a, b, "scal_elementwise")
    policy = policy or default_policy()

    def body(start: int, stop: int) -> None:
        a[start:stop] *= b[start:stop]

    _launch(n, policy, body)


def scal(alpha: float, x: np.ndarray, policy: Optional[ExecPolicy] = None) -> None:
    policy = policy or default_policy()

    def body(start: int, stop: int) -> None:
        x[start:stop] *= alpha

    _launch(x.shape[0], policy, body)


def copy(x: np.ndarray, out: np.ndarray, policy: Optional[ExecPolicy] = None) -> None:
    n = _check_lengths(x, out, "copy")
    policy = policy or default_policy()

    def body(start: int, stop: int) -> None:
        out[start:stop] = x[start:stop]

    _launch(n, policy, body)


def dot(x: np.ndarray, y: np.ndarray, policy: Optional[ExecPolicy] = None) -> float:
    """Two-phase reduction.

    Phase one writes one partial sum per block of block_size elements (the
    value thread 0 of each block would store); phase two adds the partials
    strictly left to right.
    """
    n = _check_lengths(x, y, "dot")
    policy = policy or default_policy()
    block_size = policy.block_size
    n_blocks = blocks_for_length(n, block_size)
    if n_blocks == 0:
        return 0.0
    partials = np.zeros(n_blocks, dtype=VALUE_DTYPE)

    def body(start: int, stop: int) -> None:
        products = x[start:stop] * y[start:stop]
        first_block = start // block_size
        n_full = (stop - start) // block_size
        if n_full:
            partials[first_block:first_block + n_full] = (
                products[:n_full * block_size].reshape(n_full, block_size).sum(axis=1)
            )
        if n_full * block_size < stop - start:
            partials[first_block + n_full] = products[n_full * block_size:].sum()

    _launch(n, policy, body)
    # accumulate is a sequential scan, unlike sum()
    return float(np.add.accumulate(partials)[-1])


def norm2(x: np.ndarray, policy: Optional[ExecPolicy] = None) -> float:
    return float(np.sqrt(dot(x, x, policy)))
