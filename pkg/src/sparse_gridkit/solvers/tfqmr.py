import math
from typing import Optional

import numpy as np

from .base import LeftPreconditionedSolver
from ..errors import NonFinite
from ..formats.base import SparseMatrix
from ..kernels.vector import daxpy, scal, xpay
from ..schemas.solver import SolveReport, SolverConfig


class _Recurrence:
    """Vectors and scalars of one tfQMR cycle, started from residual r0"""

    def __init__(self, solver: "TFQMRSolver", r0: np.ndarray):
        self.r0 = r0
        self.rho = solver.dot(r0, r0)
        self.tau = solver.norm(r0)
        self.theta = 0.0
        self.eta = 0.0
        self.y = r0.copy()
        self.w = r0.copy()
        self.d = np.zeros_like(r0)
        self.u = solver.apply_operator(self.y)
        self.v = self.u.copy()


class TFQMRSolver(LeftPreconditionedSolver):
    """
    Transpose-free quasi-minimal residual on B = M^-1 A.

    One iteration is two half-steps (2 operator applications plus one to
    refresh u). The quasi-residual bound tau * sqrt(m + 1) / tau0 is the
    recorded measure; when it drops below the tolerance the true
    preconditioned residual is computed and only that decides convergence.
    If the true residual is still above the tolerance, the recurrence
    restarts from it, so a stagnating bound never ends in a breakdown.
    Only a vanishing rho or sigma is a breakdown.
    """

    name = "Transpose-Free Quasi-Minimal Residual"
    acronym = "P-tfQMR"

    def _true_measure(self, b: np.ndarray, x: np.ndarray, s0: float) -> float:
        return self.norm(self.preconditioned_residual(b, x)) / s0

    def _iterate(self, b: np.ndarray, x: np.ndarray) -> bool:
        r0, s0 = self.initial_residual(b, x)
        if s0 == 0.0:
            return True

        while self.iterations < self.max_iterations:
            outcome = self._cycle(_Recurrence(self, r0), b, x, s0)
            if outcome is not None:
                return outcome
            r0 = self.preconditioned_residual(b, x)
            self.logger.debug("restart from the true residual after %d iterations", self.iterations)
        return False

    def _cycle(self, st: _Recurrence, b: np.ndarray, x: np.ndarray, s0: float) -> Optional[bool]:
        """Run one cycle: True when converged, False at the iteration cap,
        None when the bound met the tolerance but the true residual did not."""
        policy = self.policy
        r0, w, y, d, u, v = st.r0, st.w, st.y, st.d, st.u, st.v
        m = 0

        def half_step(alpha: float, z: np.ndarray) -> float:
            nonlocal m
            m += 1
            if st.tau == 0.0:
                return 0.0
            daxpy(-alpha, u, w, policy)
            scal(st.theta * st.theta * st.eta / alpha, d, policy)
            daxpy(1.0, z, d, policy)
            st.theta = self.norm(w) / st.tau
            c = 1.0 / math.sqrt(1.0 + st.theta * st.theta)
            st.tau *= st.theta * c
            if not math.isfinite(st.tau):
                raise NonFinite(f"{self.acronym}: quasi-residual is {st.tau} at iteration {self.iterations + 1}")
            st.eta = c * c * alpha
            daxpy(st.eta, d, x, policy)
            return st.tau * math.sqrt(m + 1) / s0

        def settle() -> Optional[bool]:
            measure = self._true_measure(b, x, s0)
            self._record(measure)
            if self.converged(measure):
                return True
            return False if self.iterations >= self.max_iterations else None

        while self.iterations < self.max_iterations:
            sigma = self.dot(r0, v)
            self._check_vanishing(sigma, "sigma = <r0,v>")
            alpha = st.rho / sigma

            if self.converged(half_step(alpha, y)):
                return settle()

            daxpy(-alpha, v, y, policy)
            self.apply_operator(y, u)
            bound = half_step(alpha, y)
            if self.converged(bound):
                return settle()

            self._record(bound)
            rho_next = self.dot(r0, w)
            self._check_vanishing(rho_next, "rho = <r0,w>")
            beta = rho_next / st.rho
            st.rho = rho_next

            xpay(w, beta, y, policy)             # y := w + beta y
            xpay(u, beta, v, policy)             # v := u + beta v
            scal(beta, v, policy)                # v := beta (u + beta v)
            self.apply_operator(y, u)
            daxpy(1.0, u, v, policy)
        return False


def solve_tfqmr(A: SparseMatrix, b, x0=None, cfg: Optional[SolverConfig] = None) -> SolveReport:
    return TFQMRSolver(A, cfg).solve(b, x0)
