import logging
import time
from itertools import product
from typing import Dict, List, Optional, Sequence

import numpy as np

from .timing import Clock, time_kernel
from ..formats.base import SparseMatrix, VALUE_DTYPE
from ..kernels.spmv import spmv
from ..schemas.bench import BenchRecord, TimingProtocol, TuneResult
from ..schemas.policy import BLOCK_SIZES, WORKERS_PER_ROW, ExecPolicy, GridStrategy
from ..config import default_worker_count

logger = logging.getLogger(__name__)

TUNE_SEED = 0


def default_policy_grid(worker_count: Optional[int] = None) -> List[ExecPolicy]:
    """Full cross product block_size x workers_per_row x strategy, in tie-break order"""
    worker_count = worker_count or default_worker_count()
    return [
        ExecPolicy(block_size=bs, workers_per_row=tw, grid_strategy=strategy, worker_count=worker_count)
        for bs, tw, strategy in product(BLOCK_SIZES, WORKERS_PER_ROW, (GridStrategy.FLAT_X, GridStrategy.SQUARE))
    ]


def select_best(table: Sequence[BenchRecord]) -> BenchRecord:
    """Fastest record; ties go to the smaller block, fewer lanes, then FlatX"""
    if not table:
        raise ValueError("cannot select from an empty table")
    return min(table, key=lambda record: (record.mean_time, record.policy.sort_key()))


def _relative_deviation(y: np.ndarray, reference: np.ndarray) -> float:
    scale = float(np.max(np.abs(reference))) if reference.size else 0.0
    diff = float(np.max(np.abs(y - reference))) if reference.size else 0.0
    if diff == 0.0:
        return 0.0
    return diff / scale if scale > 0.0 else float("inf")


def tune_spmv(
    m: SparseMatrix,
    grid: Optional[Sequence[ExecPolicy]] = None,
    protocol: Optional[TimingProtocol] = None,
    matrix_name: str = "",
    clock_resolution: Optional[float] = None,
    x: Optional[np.ndarray] = None,
    clock: Clock = time.perf_counter,
) -> TuneResult:
    """Time SpMV on m under every policy of the grid (sequentially) and pick the fastest"""
    grid = list(grid) if grid is not None else default_policy_grid()
    if not grid:
        raise ValueError("policy grid must not be empty")
    if x is None:
        x = np.random.default_rng(TUNE_SEED).uniform(-1.0, 1.0, m.n_cols)
    kernel_name = f"spmv_{m.format_name}"

    def measure(policy: ExecPolicy) -> tuple:
        y = np.zeros(m.n_rows, dtype=VALUE_DTYPE)
        record = time_kernel(
            lambda: spmv(m, x, policy, out=y),
            protocol,
            clock_resolution,
            kernel_name=kernel_name,
            matrix_name=matrix_name,
            policy=policy,
            clock=clock,
        )
        logger.info("%-22s reps=%-7d mean=%.4f ms", policy.label(), record.reps, record.mean_ms)
        return record, y

    table: List[BenchRecord] = []
    outputs: Dict[ExecPolicy, np.ndarray] = {}
    for policy in grid:
        record, y = measure(policy)
        table.append(record)
        outputs[policy] = y

    default = ExecPolicy(worker_count=grid[0].worker_count)
    if default in outputs:
        default_record = next(r for r in table if r.policy == default)
    else:
        default_record, outputs[default] = measure(default)

    best = select_best(table)
    speedup = default_record.mean_time / best.mean_time if best.mean_time > 0.0 else 1.0
    deviation = max(_relative_deviation(outputs[p], outputs[default]) for p in grid)
    logger.info("best policy %s, speedup %.3f vs default", best.policy.label(), speedup)
    return TuneResult(
        best_policy=best.policy,
        table=table,
        default_record=default_record,
        speedup_vs_default=speedup,
        max_relative_deviation=deviation,
    )
