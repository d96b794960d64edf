from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .base import SparseMatrix, INDEX_DTYPE, VALUE_DTYPE, frozen_array
from .coo import CooMatrix
from ..errors import DimensionMismatch, IndexOutOfRange


@dataclass(frozen=True, eq=False, repr=False)
class CsrMatrix(SparseMatrix):
    """Compressed sparse row storage (AA, JA, IA), 0-based: row_ptr[n_rows] == nnz."""
    n_rows: int
    n_cols: int
    row_ptr: np.ndarray
    col_idx: np.ndarray
    values: np.ndarray

    format_name = "csr"

    def __post_init__(self):
        row_ptr = frozen_array(self.row_ptr, INDEX_DTYPE)
        col_idx = frozen_array(self.col_idx, INDEX_DTYPE)
        values = frozen_array(self.values, VALUE_DTYPE)
        if row_ptr.size != self.n_rows + 1:
            raise DimensionMismatch(f"row_ptr has {row_ptr.size} entries, expected {self.n_rows + 1}")
        if col_idx.size != values.size:
            raise DimensionMismatch(f"col_idx/values lengths differ: {col_idx.size} vs {values.size}")
        if row_ptr[0] != 0 or row_ptr[-1] != values.size or np.any(np.diff(row_ptr) < 0):
            raise ValueError("row_ptr must start at 0, be non-decreasing and end at nnz")
        if col_idx.size and (col_idx.min() < 0 or col_idx.max() >= self.n_cols):
            raise IndexOutOfRange(f"column index outside [0, {self.n_cols})")
        if col_idx.size > 1:
            # strictly increasing within each row: a drop is only allowed at a row start
            drops = np.flatnonzero(np.diff(col_idx) <= 0) + 1
            row_starts = np.zeros(col_idx.size, dtype=bool)
            row_starts[row_ptr[1:-1][row_ptr[1:-1] < col_idx.size]] = True
            if drops.size and not np.all(row_starts[drops]):
                raise ValueError("CSR columns must be strictly increasing within each row")
        object.__setattr__(self, "row_ptr", row_ptr)
        object.__setattr__(self, "col_idx", col_idx)
        object.__setattr__(self, "values", values)

    @property
    def nnz(self) -> int:
        return int(self.values.size)

    @cached_property
    def row_nnz(self) -> np.ndarray:
        return np.diff(self.row_ptr)

    @cached_property
    def entry_rows(self) -> np.ndarray:
        """Row index of every stored entry (the expanded IA)"""
        return np.repeat(np.arange(self.n_rows, dtype=INDEX_DTYPE), self.row_nnz)

    @cached_property
    def entry_slots(self) -> np.ndarray:
        """Position of every stored entry inside its row"""
        return np.arange(self.nnz, dtype=INDEX_DTYPE) - self.row_ptr[self.entry_rows]

    def to_coo(self) -> CooMatrix:
        return CooMatrix(self.n_rows, self.n_cols, self.entry_rows, self.col_idx, self.values)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CsrMatrix):
            return NotImplemented
        return (
            self.shape == other.shape
            and np.array_equal(self.row_ptr, other.row_ptr)
            and np.array_equal(self.col_idx, other.col_idx)
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None


def coo_to_csr(m: CooMatrix) -> CsrMatrix:
    """Row-by-row storage of a canonical COO matrix"""
    counts = np.bincount(m.row_idx, minlength=m.n_rows) if m.nnz else np.zeros(m.n_rows, dtype=INDEX_DTYPE)
    row_ptr = np.zeros(m.n_rows + 1, dtype=INDEX_DTYPE)
    np.cumsum(counts, out=row_ptr[1:])
    return CsrMatrix(m.n_rows, m.n_cols, row_ptr, m.col_idx, m.values)


def csr_to_coo(m: CsrMatrix) -> CooMatrix:
    return m.to_coo()


def transpose(m: CsrMatrix) -> CsrMatrix:
    coo = m.to_coo()
    return coo_to_csr(CooMatrix(m.n_cols, m.n_rows, coo.col_idx, coo.row_idx, coo.values))
