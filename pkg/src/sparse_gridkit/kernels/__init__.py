"""
Data-parallel kernels driven by an ExecPolicy.
"""

from .grid import grid_spmv_blocks, blocks_for_length, compute_grid, schedule_blocks
from .pool import run_tasks, shutdown_pools
from .vector import daxpy, xpay, scal_elementwise, scal, copy, dot, norm2
from .spmv import spmv, tree_reduce_lanes

__all__ = [
    "grid_spmv_blocks", "blocks_for_length", "compute_grid", "schedule_blocks",
    "run_tasks", "shutdown_pools",
    "daxpy", "xpay", "scal_elementwise", "scal", "copy", "dot", "norm2",
    "spmv", "tree_reduce_lanes",
]
