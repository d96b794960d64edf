"""
Preconditioned Krylov solvers and the method registry used by the CLI.
"""

from typing import Dict, Optional, Type

from .base import KrylovSolver, LeftPreconditionedSolver, VANISHING
from .preconditioner import IdentityPreconditioner, JacobiPreconditioner, make_preconditioner
from .cg import PCGSolver, ClassicCGSolver, descent_recurrence, solve_pcg, solve_cg_classic
from .gcr import GCRSolver, solve_gcr
from .bicgstab import BiCGStabSolver, solve_bicgstab
from .bicgstab_l import BiCGStabLSolver, solve_bicgstab_l
from .tfqmr import TFQMRSolver, solve_tfqmr
from .bicgcr import BiCGCRSolver, solve_bicgcr
from ..formats.base import SparseMatrix
from ..schemas.solver import Preconditioner, SolveReport, SolverConfig

SOLVERS: Dict[str, Type[KrylovSolver]] = {
    "cg": PCGSolver,
    "gcr": GCRSolver,
    "bicgcr": BiCGCRSolver,
    "tfqmr": TFQMRSolver,
    "bicgstab": BiCGStabSolver,
    "bicgstabl": BiCGStabLSolver,
    "cg-classic": ClassicCGSolver,
}


def solve(method: str, A: SparseMatrix, b, x0=None, cfg: Optional[SolverConfig] = None) -> SolveReport:
    """Dispatch to a registered method by name"""
    try:
        solver_cls = SOLVERS[method.lower()]
    except KeyError:
        raise ValueError(f"unknown method '{method}', expected one of {sorted(SOLVERS)}") from None
    cfg = cfg or SolverConfig()
    if solver_cls is ClassicCGSolver:
        cfg = cfg.model_copy(update={"preconditioner": Preconditioner.NONE})
    return solver_cls(A, cfg).solve(b, x0)


__all__ = [
    "KrylovSolver", "LeftPreconditionedSolver", "VANISHING",
    "IdentityPreconditioner", "JacobiPreconditioner", "make_preconditioner",
    "PCGSolver", "ClassicCGSolver", "descent_recurrence", "solve_pcg", "solve_cg_classic",
    "GCRSolver", "solve_gcr",
    "BiCGStabSolver", "solve_bicgstab",
    "BiCGStabLSolver", "solve_bicgstab_l",
    "TFQMRSolver", "solve_tfqmr",
    "BiCGCRSolver", "solve_bicgcr",
    "SOLVERS", "solve",
]
