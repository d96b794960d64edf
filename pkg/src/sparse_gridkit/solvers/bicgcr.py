from typing import Optional

import numpy as np

from .base import LeftPreconditionedSolver
from ..formats.convert import to_csr
from ..formats.csr import transpose
from ..formats.base import SparseMatrix
from ..kernels.spmv import spmv
from ..kernels.vector import daxpy, xpay
from ..schemas.solver import SolveReport, SolverConfig


class BiCGCRSolver(LeftPreconditionedSolver):
    """
    Bi-Conjugate Residual: BiCG run in the bilinear form (u, B v), on
    B = M^-1 A with the shadow residual starting at s0.

    alpha = (r*, B r) / (B^T p*, B p), beta = (r*+, B r+) / (r*, B r).
    With a symmetric B and r* = r it is the conjugate residual method.
    Needs products with B^T = A^T M^-1, so A^T is formed once in CSR.
    """

    name = "Bi-Conjugate Residual"
    acronym = "P-BiCGCR"

    def __init__(self, A: SparseMatrix, config: Optional[SolverConfig] = None):
        super().__init__(A, config)
        self.At = transpose(to_csr(A))

    def apply_transpose(self, v: np.ndarray, out: Optional[np.ndarray] = None) -> np.ndarray:
        """out <- A^T M^-1 v"""
        scaled = self.precon.apply(v, np.empty_like(v), self.policy)
        self.matvecs += 1
        return spmv(self.At, scaled, self.policy, out)

    def _iterate(self, b: np.ndarray, x: np.ndarray) -> bool:
        policy = self.policy
        r, s0 = self.initial_residual(b, x)
        if s0 == 0.0:
            return True

        r_star = r.copy()
        Br = self.apply_operator(r)
        Bt_r_star = self.apply_transpose(r_star)
        p = r.copy()
        p_star = r_star.copy()
        Bp = Br.copy()
        Bt_p_star = Bt_r_star.copy()
        numerator = self.dot(r_star, Br)

        while self.iterations < self.max_iterations:
            self._check_vanishing(numerator, "(r*, Br)")
            denominator = self.dot(Bt_p_star, Bp)
            self._check_vanishing(denominator, "(B^T p*, Bp)")
            alpha = numerator / denominator
            daxpy(alpha, p, x, policy)
            daxpy(-alpha, Bp, r, policy)
            daxpy(-alpha, Bt_p_star, r_star, policy)

            measure = self.norm(r) / s0
            self._record(measure)
            if self.converged(measure):
                return True

            self.apply_operator(r, Br)
            self.apply_transpose(r_star, Bt_r_star)
            numerator_next = self.dot(r_star, Br)
            beta = numerator_next / numerator
            numerator = numerator_next
            xpay(r, beta, p, policy)
            xpay(r_star, beta, p_star, policy)
            xpay(Br, beta, Bp, policy)
            xpay(Bt_r_star, beta, Bt_p_star, policy)
        return False


def solve_bicgcr(A: SparseMatrix, b, x0=None, cfg: Optional[SolverConfig] = None) -> SolveReport:
    return BiCGCRSolver(A, cfg).solve(b, x0)
