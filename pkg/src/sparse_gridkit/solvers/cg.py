"""
Conjugate gradient in two formulations.

PCGSolver keeps the device-kernel layout: z = M^-1 r, rho = <r,z>, p reuses the
storage of z, and the stopping test is rho / ||r0||.

ClassicCGSolver follows the descent-direction recurrences with the residual
g = K x - b, the step rho = -(g,w)/(Kw,w) and the K-orthogonal direction
update gamma = -(g+,Kw)/(Kw,w). The recurrence itself is `descent_recurrence`,
which only talks to its operator and scalar product through callbacks so the
sub-structured solver can run it unchanged on local vectors.
"""

import math
from typing import Callable, Optional, Tuple

import numpy as np

from .base import KrylovSolver, VANISHING
from ..errors import Breakdown, NonFinite
from ..formats.base import SparseMatrix
from ..kernels.vector import daxpy, xpay
from ..schemas.policy import ExecPolicy
from ..schemas.solver import Preconditioner, SolveReport, SolverConfig


class PCGSolver(KrylovSolver):
    name = "Preconditioned Conjugate Gradient"
    acronym = "P-CG"

    def _iterate(self, b: np.ndarray, x: np.ndarray) -> bool:
        policy = self.policy
        r = self.matvec(x)                      # r := A x0
        r *= -1.0
        r += b                                  # r := b - A x0
        norm_r0 = self.norm(r)
        self.logger.info("Initial residual = %8.2e", norm_r0)
        if norm_r0 == 0.0:
            return True

        z = self.precon.apply(r, np.empty_like(r), policy)
        rho = self.dot(r, z)
        p = np.zeros_like(r)
        Ap = np.empty_like(r)
        rho_1 = 0.0
        first = True

        while self.iterations < self.max_iterations:
            beta = None
            if first:
                first = False
            else:
                beta = rho / rho_1
                daxpy(beta, p, z, policy)       # z := z + beta p
            p, z = z, p                         # Move(z, p)

            self.matvec(p, Ap)
            sigma = self.dot(p, Ap)
            self._check_vanishing(sigma, "sigma = <p,Ap>")
            alpha = rho / sigma
            daxpy(alpha, p, x, policy)
            daxpy(-alpha, Ap, r, policy)
            rho_1 = rho
            if self.config.record_trace:
                self.trace.append({"iteration": self.iterations + 1, "rho": rho, "beta": beta,
                                   "sigma": sigma, "alpha": alpha})

            # the next pass's z and rho, computed here so the test sees the updated r
            self.precon.apply(r, z, policy)
            rho = self.dot(r, z)
            norm_r = rho / norm_r0
            self._record(norm_r)
            if self.converged(norm_r):
                return True
            if rho < 0.0:
                raise Breakdown(f"{self.acronym}: <r,z> = {rho:.3e} < 0, preconditioned operator is not SPD")
            if abs(rho) < VANISHING:
                raise Breakdown(f"{self.acronym}: rho = <r,z> vanished at iteration {self.iterations}")
        return False


Matvec = Callable[[np.ndarray], np.ndarray]
Dot = Callable[[np.ndarray, np.ndarray], float]


def descent_recurrence(
    matvec: Matvec,
    dot: Dot,
    x: np.ndarray,
    g: np.ndarray,
    tolerance: float,
    max_iterations: int,
    policy: ExecPolicy,
    on_iteration: Callable[[int, float, float, float], None],
) -> Tuple[bool, int]:
    """CG on K x = b from x with g = K x - b; x and g are updated in place.

    Stops when ||g|| / ||g0|| <= tolerance. on_iteration(p, measure, rho, gamma)
    is called after every step.
    """
    g0 = math.sqrt(dot(g, g))
    if g0 == 0.0:
        return True, 0
    w = g.copy()
    for iteration in range(1, max_iterations + 1):
        Kw = matvec(w)
        kww = dot(Kw, w)
        if not math.isfinite(kww):
            raise NonFinite(f"CG: (Kw,w) is {kww} at iteration {iteration}")
        if abs(kww) < VANISHING:
            raise Breakdown(f"CG: (Kw,w) vanished at iteration {iteration}")
        rho = -dot(g, w) / kww
        daxpy(rho, w, x, policy)
        daxpy(rho, Kw, g, policy)
        gamma = -dot(g, Kw) / kww
        xpay(g, gamma, w, policy)               # w := g + gamma w
        measure = math.sqrt(dot(g, g)) / g0
        on_iteration(iteration, measure, rho, gamma)
        if measure <= tolerance:
            return True, iteration
    return False, max_iterations


class ClassicCGSolver(KrylovSolver):
    """Unpreconditioned descent-direction CG; the sub-structuring reference"""

    name = "Conjugate Gradient (descent directions)"
    acronym = "CG"

    def _iterate(self, b: np.ndarray, x: np.ndarray) -> bool:
        g = self.matvec(x)
        g -= b                                  # g0 = K x0 - b
        self.logger.info("Initial residual = %8.2e", self.norm(g))

        def on_iteration(iteration: int, measure: float, rho: float, gamma: float) -> None:
            if self.config.record_trace:
                self.trace.append({"iteration": iteration, "rho": rho, "gamma": gamma})
            self._record(measure)

        converged, _ = descent_recurrence(
            self.matvec, self.dot, x, g, self.tolerance, self.max_iterations, self.policy, on_iteration
        )
        return converged


def solve_pcg(A: SparseMatrix, b, x0=None, cfg: Optional[SolverConfig] = None) -> SolveReport:
    return PCGSolver(A, cfg).solve(b, x0)


def solve_cg_classic(A: SparseMatrix, b, x0=None, cfg: Optional[SolverConfig] = None) -> SolveReport:
    """Descent-direction CG; the preconditioner setting of cfg is ignored"""
    cfg = (cfg or SolverConfig()).model_copy(update={"preconditioner": Preconditioner.NONE})
    return ClassicCGSolver(A, cfg).solve(b, x0)
