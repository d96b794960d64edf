from typing import Optional

import numpy as np

from .base import LeftPreconditionedSolver
from ..errors import Breakdown
from ..formats.base import SparseMatrix
from ..kernels.vector import daxpy, xpay
from ..schemas.solver import SolveReport, SolverConfig


class BiCGStabLSolver(LeftPreconditionedSolver):
    """
    BiCGStab(l) on B = M^-1 A.

    Every cycle runs l BiCG steps that build r_0..r_l and u_0..u_l, then a
    minimal-residual step over span{r_1..r_l} solved through the l x l normal
    equations. l = 1 is BiCGStab. One iteration is one cycle (2l operator
    applications); the residual is tested after every BiCG step.
    """

    name = "Bi-Conjugate Gradient Stabilized (l)"
    acronym = "P-BiCGStab(l)"

    def _iterate(self, b: np.ndarray, x: np.ndarray) -> bool:
        policy = self.policy
        degree = self.config.stab_l
        r, s0 = self.initial_residual(b, x)
        if s0 == 0.0:
            return True

        r_shadow = r.copy()
        R = [r] + [np.zeros_like(r) for _ in range(degree)]
        U = [np.zeros_like(r) for _ in range(degree + 1)]
        rho0, alpha, omega = 1.0, 0.0, 1.0

        while self.iterations < self.max_iterations:
            rho0 = -omega * rho0

            # BiCG part
            for j in range(degree):
                rho1 = self.dot(R[j], r_shadow)
                self._check_vanishing(rho0, "rho")
                beta = alpha * rho1 / rho0
                rho0 = rho1
                for i in range(j + 1):
                    xpay(R[i], -beta, U[i], policy)       # u_i := r_i - beta u_i
                self.apply_operator(U[j], U[j + 1])
                gamma = self.dot(U[j + 1], r_shadow)
                self._check_vanishing(gamma, "<Bu, r_shadow>")
                alpha = rho0 / gamma
                for i in range(j + 1):
                    daxpy(-alpha, U[i + 1], R[i], policy)
                self.apply_operator(R[j], R[j + 1])
                daxpy(alpha, U[0], x, policy)

                measure = self.norm(R[0]) / s0
                if self.converged(measure):
                    self._record(measure)
                    return True

            # MR part
            gram = np.array([[self.dot(R[i], R[j]) for j in range(1, degree + 1)] for i in range(1, degree + 1)])
            rhs = np.array([self.dot(R[i], R[0]) for i in range(1, degree + 1)])
            try:
                coeffs = np.linalg.solve(gram, rhs)
            except np.linalg.LinAlgError as error:
                raise Breakdown(f"{self.acronym}: singular minimal-residual system ({error})")
            if not np.all(np.isfinite(coeffs)):
                raise Breakdown(f"{self.acronym}: minimal-residual coefficients are not finite")
            omega = float(coeffs[-1])
            self._check_vanishing(omega, "omega")
            for j in range(1, degree + 1):
                g = float(coeffs[j - 1])
                daxpy(g, R[j - 1], x, policy)
                daxpy(-g, R[j], R[0], policy)
                daxpy(-g, U[j], U[0], policy)

            measure = self.norm(R[0]) / s0
            self._record(measure)
            if self.converged(measure):
                return True
        return False


def solve_bicgstab_l(A: SparseMatrix, b, x0=None, cfg: Optional[SolverConfig] = None) -> SolveReport:
    return BiCGStabLSolver(A, cfg).solve(b, x0)
