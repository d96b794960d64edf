from typing import List, Optional

import numpy as np

from .base import LeftPreconditionedSolver
from ..formats.base import SparseMatrix
from ..kernels.vector import daxpy
from ..schemas.solver import SolveReport, SolverConfig


class GCRSolver(LeftPreconditionedSolver):
    """
    Restarted Generalized Conjugate Residual, GCR(m), on B = M^-1 A.

    Each step takes the current residual s as new direction p, makes
    q = B p orthogonal to the stored q_i (modified Gram-Schmidt, the same
    combination applied to p), then minimizes ||s - alpha q||. The stored
    directions are dropped every `restart` steps. Within a cycle ||s|| never
    increases.

    One operator application and j + 3 dot products at step j of a cycle.
    """

    name = "Generalized Conjugate Residual"
    acronym = "P-GCR"

    def _iterate(self, b: np.ndarray, x: np.ndarray) -> bool:
        policy = self.policy
        restart = self.config.restart
        s, s0 = self.initial_residual(b, x)
        if s0 == 0.0:
            return True

        while self.iterations < self.max_iterations:
            directions: List[np.ndarray] = []
            images: List[np.ndarray] = []
            squared_norms: List[float] = []
            for _ in range(restart):
                p = s.copy()
                q = self.apply_operator(p)
                for p_i, q_i, qq_i in zip(directions, images, squared_norms):
                    beta = self.dot(q, q_i) / qq_i
                    daxpy(-beta, q_i, q, policy)
                    daxpy(-beta, p_i, p, policy)
                qq = self.dot(q, q)
                self._check_vanishing(qq, "direction norm <Bp,Bp>")
                alpha = self.dot(s, q) / qq
                daxpy(alpha, p, x, policy)
                daxpy(-alpha, q, s, policy)
                directions.append(p)
                images.append(q)
                squared_norms.append(qq)

                measure = self.norm(s) / s0
                self._record(measure)
                if self.converged(measure):
                    return True
                if self.iterations >= self.max_iterations:
                    return False
            self.logger.debug("restart after %d iterations", self.iterations)
        return False


def solve_gcr(A: SparseMatrix, b, x0=None, cfg: Optional[SolverConfig] = None) -> SolveReport:
    return GCRSolver(A, cfg).solve(b, x0)
