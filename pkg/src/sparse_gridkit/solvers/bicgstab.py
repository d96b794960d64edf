from typing import Optional

import numpy as np

from .base import LeftPreconditionedSolver
from ..formats.base import SparseMatrix
from ..kernels.vector import daxpy, xpay
from ..schemas.solver import SolveReport, SolverConfig


class BiCGStabSolver(LeftPreconditionedSolver):
    """
    Bi-Conjugate Gradient Stabilized on B = M^-1 A with shadow residual
    r_hat = s0.

    Two operator applications per iteration. The half-step residual is
    tested first, so a solve can end after the BiCG half of an iteration.
    """

    name = "Bi-Conjugate Gradient Stabilized"
    acronym = "P-BiCGStab"

    def _iterate(self, b: np.ndarray, x: np.ndarray) -> bool:
        policy = self.policy
        r, s0 = self.initial_residual(b, x)
        if s0 == 0.0:
            return True

        r_hat = r.copy()
        rho = self.dot(r_hat, r)
        p = r.copy()
        v = np.empty_like(r)
        t = np.empty_like(r)

        while self.iterations < self.max_iterations:
            self.apply_operator(p, v)
            r_hat_v = self.dot(r_hat, v)
            self._check_vanishing(r_hat_v, "<r_hat, Bp>")
            alpha = rho / r_hat_v
            daxpy(-alpha, v, r, policy)          # r now holds the half-step residual
            half_measure = self.norm(r) / s0
            if self.converged(half_measure):
                daxpy(alpha, p, x, policy)
                self._record(half_measure)
                return True

            self.apply_operator(r, t)
            tt = self.dot(t, t)
            self._check_vanishing(tt, "<Bs,Bs>")
            omega = self.dot(t, r) / tt
            self._check_vanishing(omega, "omega")
            daxpy(alpha, p, x, policy)
            daxpy(omega, r, x, policy)
            daxpy(-omega, t, r, policy)

            measure = self.norm(r) / s0
            self._record(measure)
            if self.converged(measure):
                return True

            rho_next = self.dot(r_hat, r)
            self._check_vanishing(rho_next, "<r_hat, r>")
            beta = (rho_next / rho) * (alpha / omega)
            rho = rho_next
            daxpy(-omega, v, p, policy)          # p := p - omega v
            xpay(r, beta, p, policy)             # p := r + beta p
        return False


def solve_bicgstab(A: SparseMatrix, b, x0=None, cfg: Optional[SolverConfig] = None) -> SolveReport:
    return BiCGStabSolver(A, cfg).solve(b, x0)
