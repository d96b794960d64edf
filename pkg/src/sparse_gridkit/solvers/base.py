import logging
import math
import time
from abc import ABC, abstractmethod
from typing import Dict, List, Optional

import numpy as np

from .preconditioner import make_preconditioner
from ..errors import Breakdown, DimensionMismatch, NonFinite, SolverError
from ..formats.base import SparseMatrix, VALUE_DTYPE
from ..kernels.spmv import spmv
from ..kernels.vector import dot, norm2
from ..schemas.solver import SolveReport, SolverConfig

# |q| below this counts as a vanishing denominator
VANISHING = 1e-300


class KrylovSolver(ABC):
    """Common driver of the Krylov methods.

    Subclasses implement `_iterate`, which updates x in place, calls
    `_record` once per iteration and returns whether the tolerance was met.
    Everything else (operators, history, timing, reports) lives here.
    """

    name: str = ""
    acronym: str = ""

    def __init__(self, A: SparseMatrix, config: Optional[SolverConfig] = None):
        if A.n_rows != A.n_cols:
            raise DimensionMismatch(f"{self.acronym}: matrix must be square, got {A.n_rows}x{A.n_cols}")
        self.A = A
        self.n = A.n_rows
        self.config = config or SolverConfig()
        self.policy = self.config.policy
        self.tolerance = self.config.tolerance
        self.max_iterations = self.config.max_iterations
        self.precon = make_preconditioner(self.config.preconditioner, A)
        self.logger = logging.getLogger(f"{__name__}.{self.acronym}")
        self.history: List[float] = []
        self.trace: List[Dict[str, Optional[float]]] = []
        self.matvecs = 0

    @property
    def iterations(self) -> int:
        return len(self.history)

    # operators

    def matvec(self, v: np.ndarray, out: Optional[np.ndarray] = None) -> np.ndarray:
        self.matvecs += 1
        return spmv(self.A, v, self.policy, out)

    def apply_operator(self, v: np.ndarray, out: Optional[np.ndarray] = None) -> np.ndarray:
        """out <- M^-1 A v (left-preconditioned operator)"""
        out = self.matvec(v, out)
        return self.precon.scale(out, self.policy)

    def preconditioned_residual(self, b: np.ndarray, x: np.ndarray) -> np.ndarray:
        """M^-1 (b - A x)"""
        s = self.matvec(x)
        s *= -1.0
        s += b
        return self.precon.scale(s, self.policy)

    def dot(self, x: np.ndarray, y: np.ndarray) -> float:
        return dot(x, y, self.policy)

    def norm(self, x: np.ndarray) -> float:
        return norm2(x, self.policy)

    # bookkeeping

    def _record(self, measure: float) -> None:
        self.history.append(float(measure))
        self.logger.debug("%6d  %8.2e", self.iterations, measure)
        if not math.isfinite(measure):
            raise NonFinite(f"{self.acronym}: residual measure is {measure} at iteration {self.iterations}")

    def _check_vanishing(self, value: float, what: str) -> None:
        if not math.isfinite(value):
            raise NonFinite(f"{self.acronym}: {what} is {value} at iteration {self.iterations + 1}")
        if abs(value) < VANISHING:
            raise Breakdown(f"{self.acronym}: {what} vanished at iteration {self.iterations + 1}")

    def converged(self, measure: float) -> bool:
        return measure <= self.tolerance

    def _report(self, converged: bool, x: np.ndarray, wall_time: float) -> SolveReport:
        return SolveReport(
            method=self.acronym,
            converged=converged,
            iterations=self.iterations,
            final_residual_measure=self.history[-1] if self.history else 0.0,
            residual_history=np.array(self.history, dtype=VALUE_DTYPE),
            wall_time=wall_time,
            solution=x.copy(),
            matvecs=self.matvecs,
            trace=list(self.trace),
        )

    def solve(self, b, x0=None) -> SolveReport:
        b = np.asarray(b, dtype=VALUE_DTYPE)
        if b.shape != (self.n,):
            raise DimensionMismatch(f"{self.acronym}: rhs has shape {b.shape}, system has {self.n} equations")
        if x0 is None:
            x = np.zeros(self.n, dtype=VALUE_DTYPE)
        else:
            x = np.array(x0, dtype=VALUE_DTYPE)
            if x.shape != (self.n,):
                raise DimensionMismatch(f"{self.acronym}: x0 has shape {x.shape}, system has {self.n} equations")
        self.history = []
        self.trace = []
        self.matvecs = 0

        start = time.perf_counter()
        try:
            converged = self._iterate(b, x)
        except SolverError as error:
            error.report = self._report(False, x, time.perf_counter() - start)
            self.logger.warning("%s stopped after %d iterations: %s", self.acronym, self.iterations, error)
            raise
        if converged and not np.all(np.isfinite(x)):
            raise NonFinite(f"{self.acronym}: solution contains non-finite values",
                            self._report(False, x, time.perf_counter() - start))
        report = self._report(converged, x, time.perf_counter() - start)

        if converged:
            self.logger.info("%s converged in %d iterations (%.3f s)", self.acronym, report.iterations, report.wall_time)
        else:
            self.logger.warning("%s reached max_iterations=%d, measure %.2e", self.acronym,
                                self.max_iterations, report.final_residual_measure)
        return report

    @abstractmethod
    def _iterate(self, b: np.ndarray, x: np.ndarray) -> bool:
        """Run the method from x (updated in place); True when converged"""
        pass


class LeftPreconditionedSolver(KrylovSolver):
    """Methods that iterate on B = M^-1 A with the preconditioned residual
    s = M^-1 (b - A x); their measure is ||s|| / ||s0||."""

    def initial_residual(self, b: np.ndarray, x: np.ndarray):
        s = self.preconditioned_residual(b, x)
        s0 = self.norm(s)
        self.logger.info("Initial residual = %8.2e", s0)
        return s, s0
