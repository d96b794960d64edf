from dataclasses import dataclass
from typing import Iterable, Tuple

import numpy as np

from .base import SparseMatrix, INDEX_DTYPE, VALUE_DTYPE, frozen_array
from ..errors import DimensionMismatch, IndexOutOfRange


def _canonicalize(rows: np.ndarray, cols: np.ndarray, values: np.ndarray, n_cols: int):
    """Sort row-major then by column and sum duplicate (row, col) pairs"""
    if rows.size == 0:
        return rows, cols, values
    order = np.lexsort((cols, rows))
    rows, cols, values = rows[order], cols[order], values[order]
    keys = rows * max(n_cols, 1) + cols
    starts = np.flatnonzero(np.concatenate(([True], keys[1:] != keys[:-1])))
    if starts.size == keys.size:
        return rows, cols, values
    # duplicates are summed in order of appearance (lexsort is stable)
    summed = np.add.reduceat(values, starts)
    return rows[starts], cols[starts], summed


@dataclass(frozen=True, eq=False, repr=False)
class CooMatrix(SparseMatrix):
    """Coordinate storage: AA(i) = A(IA(i), JA(i)), 0-based.

    Construction validates index ranges and leaves the arrays in canonical
    form, so two CooMatrix values holding the same matrix compare equal.
    """
    n_rows: int
    n_cols: int
    row_idx: np.ndarray
    col_idx: np.ndarray
    values: np.ndarray

    format_name = "coo"

    def __post_init__(self):
        rows = np.asarray(self.row_idx, dtype=INDEX_DTYPE).ravel()
        cols = np.asarray(self.col_idx, dtype=INDEX_DTYPE).ravel()
        values = np.asarray(self.values, dtype=VALUE_DTYPE).ravel()
        if self.n_rows < 0 or self.n_cols < 0:
            raise DimensionMismatch(f"negative shape {self.n_rows}x{self.n_cols}")
        if not (rows.size == cols.size == values.size):
            raise DimensionMismatch(
                f"COO arrays differ in length: {rows.size}, {cols.size}, {values.size}"
            )
        _check_range(rows, self.n_rows, "row")
        _check_range(cols, self.n_cols, "column")
        rows, cols, values = _canonicalize(rows, cols, values, self.n_cols)
        object.__setattr__(self, "row_idx", frozen_array(rows, INDEX_DTYPE))
        object.__setattr__(self, "col_idx", frozen_array(cols, INDEX_DTYPE))
        object.__setattr__(self, "values", frozen_array(values, VALUE_DTYPE))

    @property
    def nnz(self) -> int:
        return int(self.values.size)

    def to_coo(self) -> "CooMatrix":
        return self

    def row_counts(self) -> np.ndarray:
        return np.bincount(self.row_idx, minlength=self.n_rows).astype(INDEX_DTYPE)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CooMatrix):
            return NotImplemented
        return (
            self.shape == other.shape
            and np.array_equal(self.row_idx, other.row_idx)
            and np.array_equal(self.col_idx, other.col_idx)
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None


def _check_range(indices: np.ndarray, bound: int, axis: str) -> None:
    if indices.size == 0:
        return
    bad = np.flatnonzero((indices < 0) | (indices >= bound))
    if bad.size:
        first = int(bad[0])
        raise IndexOutOfRange(
            f"{axis} index {int(indices[first])} at entry {first} outside [0, {bound})"
        )


def build_coo(triples: Iterable[Tuple[int, int, float]], n_rows: int, n_cols: int) -> CooMatrix:
    """Build a canonical COO matrix from (row, col, value) triples"""
    triples = list(triples)
    if not triples:
        return CooMatrix(n_rows, n_cols, np.empty(0), np.empty(0), np.empty(0))
    rows, cols, values = zip(*triples)
    return CooMatrix(n_rows, n_cols, np.array(rows), np.array(cols), np.array(values, dtype=VALUE_DTYPE))


def coo_from_arrays(rows, cols, values, n_rows: int, n_cols: int) -> CooMatrix:
    return CooMatrix(n_rows, n_cols, rows, cols, values)


def coo_from_scipy(matrix) -> CooMatrix:
    """Adopt any scipy.sparse matrix (duplicates summed, zeros kept as stored)"""
    coo = matrix.tocoo()
    return CooMatrix(coo.shape[0], coo.shape[1], coo.row, coo.col, coo.data)
