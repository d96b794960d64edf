from dataclasses import dataclass

import numpy as np

from ..errors import ZeroDiagonal
from ..formats.base import SparseMatrix, VALUE_DTYPE, frozen_array
from ..formats.convert import diagonal
from ..kernels.vector import copy, scal_elementwise
from ..schemas.policy import ExecPolicy
from ..schemas.solver import Preconditioner


class IdentityPreconditioner:
    """M = I: z is a plain copy of r"""

    kind = Preconditioner.NONE

    def apply(self, r: np.ndarray, out: np.ndarray, policy: ExecPolicy) -> np.ndarray:
        copy(r, out, policy)
        return out

    def scale(self, v: np.ndarray, policy: ExecPolicy) -> np.ndarray:
        return v


@dataclass(frozen=True)
class JacobiPreconditioner:
    """M = diag(A), applied as an elementwise product with 1/a_ii"""
    inv_diag: np.ndarray

    kind = Preconditioner.JACOBI

    @classmethod
    def from_matrix(cls, A: SparseMatrix) -> "JacobiPreconditioner":
        diag = diagonal(A)
        zero = np.flatnonzero(diag == 0.0)
        if zero.size:
            raise ZeroDiagonal(int(zero[0]))
        return cls(frozen_array(1.0 / diag, VALUE_DTYPE))

    def apply(self, r: np.ndarray, out: np.ndarray, policy: ExecPolicy) -> np.ndarray:
        copy(r, out, policy)
        scal_elementwise(out, self.inv_diag, policy)
        return out

    def scale(self, v: np.ndarray, policy: ExecPolicy) -> np.ndarray:
        """v <- M^-1 v in place"""
        scal_elementwise(v, self.inv_diag, policy)
        return v


def make_preconditioner(kind: Preconditioner, A: SparseMatrix):
    if Preconditioner(kind) is Preconditioner.JACOBI:
        return JacobiPreconditioner.from_matrix(A)
    return IdentityPreconditioner()
