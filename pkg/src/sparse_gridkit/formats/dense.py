from dataclasses import dataclass, field

import numpy as np

from .base import SparseMatrix, VALUE_DTYPE, frozen_array
from ..errors import DimensionMismatch


@dataclass(frozen=True, eq=False, repr=False)
class DenseMatrix(SparseMatrix):
    """Row-major dense matrix used as the equivalence oracle."""
    n_rows: int
    n_cols: int
    data: np.ndarray = field(default=None)

    format_name = "dense"

    def __post_init__(self):
        data = np.zeros(self.n_rows * self.n_cols) if self.data is None else self.data
        data = frozen_array(data, VALUE_DTYPE)
        if data.size != self.n_rows * self.n_cols:
            raise DimensionMismatch(
                f"dense data has {data.size} values for a {self.n_rows}x{self.n_cols} matrix"
            )
        object.__setattr__(self, "data", data)

    @classmethod
    def from_array(cls, array) -> "DenseMatrix":
        array = np.asarray(array, dtype=VALUE_DTYPE)
        if array.ndim != 2:
            raise DimensionMismatch(f"expected a 2-D array, got {array.ndim} dimensions")
        return cls(array.shape[0], array.shape[1], array.ravel())

    def as_array(self) -> np.ndarray:
        return self.data.reshape(self.n_rows, self.n_cols)

    @property
    def nnz(self) -> int:
        return int(np.count_nonzero(self.data))

    def to_coo(self):
        from .coo import CooMatrix

        rows, cols = np.nonzero(self.as_array())
        return CooMatrix(self.n_rows, self.n_cols, rows, cols, self.as_array()[rows, cols])

    def to_dense(self) -> "DenseMatrix":
        return self

    def __eq__(self, other) -> bool:
        if not isinstance(other, DenseMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.data, other.data))

    __hash__ = None


def dense_to_coo(matrix: DenseMatrix):
    return matrix.to_coo()


def dense_mv(matrix: DenseMatrix, x) -> np.ndarray:
    """Reference product y = A x"""
    x = np.asarray(x, dtype=VALUE_DTYPE)
    if x.shape != (matrix.n_cols,):
        raise DimensionMismatch(f"x has length {x.shape[0]}, matrix has {matrix.n_cols} columns")
    return matrix.as_array() @ x
