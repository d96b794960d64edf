import logging
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence

import numpy as np

from .channels import ChannelGroup, GroupCancelled
from .exchange import (
    check_interface_consistency,
    distributed_dot,
    local_spmv_assemble,
    order_interfaces,
    welsh_powell_coloring,
)
from .partition import Partition, Subdomain, partition_matrix
from ..config import check_interfaces
from ..errors import SolverError
from ..formats.base import SparseMatrix, VALUE_DTYPE
from ..formats.convert import to_csr
from ..schemas.solver import SolveReport, SolverConfig
from ..solvers.cg import descent_recurrence

logger = logging.getLogger(__name__)

METHOD = "CG-substructured"


class _WorkerResult:
    def __init__(self):
        self.x_local: Optional[np.ndarray] = None
        self.history: List[float] = []
        self.converged = False
        self.matvecs = 0
        self.elapsed = 0.0


def _reassemble_solution(partition: Partition, subdomains: Sequence[Subdomain],
                         results: Sequence[_WorkerResult], n: int) -> np.ndarray:
    """Weighted average of the local solutions, owners added in id order"""
    x = np.zeros(n, dtype=VALUE_DTYPE)
    for sub, result in zip(subdomains, results):
        if result.x_local is None:
            continue
        x[sub.local_to_global] += sub.system.weights * result.x_local
    return x


def solve_cg_substructured(
    A: SparseMatrix,
    b,
    x0=None,
    n_parts: Optional[int] = None,
    assignment: Optional[Sequence[int]] = None,
    cfg: Optional[SolverConfig] = None,
    neighbor_order: str = "ascending",
    timeout: Optional[float] = None,
) -> SolveReport:
    """Descent-direction CG with one worker thread per subdomain.

    Workers only exchange interface buffers and reduction partials. Every
    worker runs the same recurrence on its local vectors, so all take the
    same scalar steps and stop at the same iteration.
    """
    cfg = cfg or SolverConfig()
    policy = cfg.policy
    csr = to_csr(A)
    n = csr.n_rows
    b = np.asarray(b, dtype=VALUE_DTYPE)
    x0 = np.zeros(n, dtype=VALUE_DTYPE) if x0 is None else np.asarray(x0, dtype=VALUE_DTYPE)
    if n_parts is None and assignment is None:
        n_parts = 1

    partition, locals_ = partition_matrix(csr, assignment=assignment, n_parts=n_parts, b=b)
    subdomains = partition.subdomains(locals_)
    colors = welsh_powell_coloring({s.id: s.neighbor_ids for s in subdomains})
    group = ChannelGroup(partition.n_subdomains, timeout=timeout)
    debug_check = check_interfaces()
    results = [_WorkerResult() for _ in subdomains]
    first_error: List[BaseException] = []
    error_lock = threading.Lock()

    def run(sub: Subdomain) -> None:
        result = results[sub.id]
        comm = group.endpoint(sub.id)
        schedule = order_interfaces(sub.interfaces, neighbor_order, colors)
        x_local = x0[sub.local_to_global].copy()
        result.x_local = x_local

        def matvec(v: np.ndarray) -> np.ndarray:
            result.matvecs += 1
            return local_spmv_assemble(sub, v, comm, policy, schedule)

        def scalar(u: np.ndarray, v: np.ndarray) -> float:
            return distributed_dot(u, v, sub.system.weights, comm, policy)

        def on_iteration(iteration: int, measure: float, rho: float, gamma: float) -> None:
            result.history.append(measure)
            if sub.id == 0:
                logger.debug("%6d  %8.2e", iteration, measure)
            if debug_check:
                check_interface_consistency(sub, x_local, comm, label=f"x at iteration {iteration}")

        start = time.perf_counter()
        try:
            g = matvec(x_local)
            g -= sub.system.b_local
            result.converged, _ = descent_recurrence(
                matvec, scalar, x_local, g, cfg.tolerance, cfg.max_iterations, policy, on_iteration
            )
        except GroupCancelled:
            raise
        except BaseException as error:
            with error_lock:
                if not first_error:
                    first_error.append(error)
            group.cancel()
            raise
        finally:
            result.elapsed = time.perf_counter() - start

    wall_start = time.perf_counter()
    with ThreadPoolExecutor(max_workers=partition.n_subdomains, thread_name_prefix="subdomain") as pool:
        futures = [pool.submit(run, sub) for sub in subdomains]
        for future in futures:
            future.exception()
    wall_time = time.perf_counter() - wall_start

    lead = results[0]
    report = SolveReport(
        method=METHOD,
        converged=lead.converged and not first_error,
        iterations=len(lead.history),
        final_residual_measure=lead.history[-1] if lead.history else 0.0,
        residual_history=np.array(lead.history, dtype=VALUE_DTYPE),
        wall_time=wall_time,
        solution=_reassemble_solution(partition, subdomains, results, n),
        matvecs=lead.matvecs,
        subdomain_times=[r.elapsed for r in results],
    )
    if first_error:
        error = first_error[0]
        if isinstance(error, SolverError):
            error.report = report
        raise error

    logger.info("%s on %d subdomains: %s after %d iterations", METHOD, partition.n_subdomains,
                "converged" if report.converged else "not converged", report.iterations)
    return report
