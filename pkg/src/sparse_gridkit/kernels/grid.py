import math
from typing import List, Optional, Tuple

from ..schemas.policy import DeviceLimits, ExecPolicy, GridShape, GridStrategy


def grid_spmv_blocks(n_rows: int, policy: ExecPolicy) -> int:
    """Blocks needed when every row gets workers_per_row lanes:
    ((WARP * n) + N_THREAD - 1) / N_THREAD"""
    if n_rows < 0:
        raise ValueError(f"n_rows must be >= 0, got {n_rows}")
    return (policy.workers_per_row * n_rows + policy.block_size - 1) // policy.block_size


def blocks_for_length(n: int, block_size: int) -> int:
    """Blocks for a one-element-per-thread vector kernel (1 + (n-1)/ntb)"""
    if n < 0:
        raise ValueError(f"length must be >= 0, got {n}")
    return 0 if n == 0 else 1 + (n - 1) // block_size


def compute_grid(
    required_blocks: int,
    strategy: GridStrategy = GridStrategy.FLAT_X,
    limits: Optional[DeviceLimits] = None,
) -> GridShape:
    """Lay out the required blocks on a grid bounded by max_grid_x"""
    if required_blocks < 1:
        raise ValueError(f"required_blocks must be >= 1, got {required_blocks}")
    limits = limits or DeviceLimits()
    max_x = limits.max_grid_x
    if required_blocks <= max_x:
        return GridShape(x=required_blocks, y=1)

    if strategy is GridStrategy.FLAT_X:
        return GridShape(x=max_x, y=(required_blocks - 1) // max_x + 1)

    side = math.isqrt(required_blocks)
    if side * side < required_blocks:
        side += 1
    if side > max_x:
        # the square would not fit the first dimension either
        return GridShape(x=max_x, y=(required_blocks - 1) // max_x + 1)
    return GridShape(x=side, y=side)


def schedule_blocks(
    required_blocks: int,
    policy: ExecPolicy,
    limits: Optional[DeviceLimits] = None,
) -> List[Tuple[int, int]]:
    """Half-open block-id ranges handed to the worker pool.

    Each grid row is one launch; a launch is split evenly over the workers.
    Grid slots past required_blocks are idle and never scheduled.
    """
    if required_blocks == 0:
        return []
    grid = compute_grid(required_blocks, policy.grid_strategy, limits)
    tasks = []
    for row in range(grid.y):
        start = row * grid.x
        stop = min(start + grid.x, required_blocks)
        if start >= stop:
            break
        chunk = -(-(stop - start) // policy.worker_count)
        for lo in range(start, stop, chunk):
            tasks.append((lo, min(lo + chunk, stop)))
    return tasks
