from abc import ABC, abstractmethod
from typing import Tuple, TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from .coo import CooMatrix
    from .dense import DenseMatrix

INDEX_DTYPE = np.int64
VALUE_DTYPE = np.float64


def frozen_array(values, dtype) -> np.ndarray:
    """Copy into a contiguous read-only array"""
    array = np.array(values, dtype=dtype, copy=True).ravel()
    array.setflags(write=False)
    return array


class SparseMatrix(ABC):
    """Common surface of the compressed storage schemes.

    Every format is immutable after construction and can be expanded to
    coordinate triples, which is how conversions and the dense oracle work.
    """

    n_rows: int
    n_cols: int

    format_name: str = ""

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.n_rows, self.n_cols)

    @property
    @abstractmethod
    def nnz(self) -> int:
        """Number of stored (non-padding) entries"""

    @abstractmethod
    def to_coo(self) -> "CooMatrix":
        """Canonical coordinate form (row-major sorted, no duplicates)"""

    def to_dense(self) -> "DenseMatrix":
        from .dense import DenseMatrix

        coo = self.to_coo()
        data = np.zeros(self.n_rows * self.n_cols, dtype=VALUE_DTYPE)
        # canonical COO has no duplicates, so plain assignment is lossless
        data[coo.row_idx * self.n_cols + coo.col_idx] = coo.values
        return DenseMatrix(self.n_rows, self.n_cols, data)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.n_rows}x{self.n_cols}, nnz={self.nnz})"
