from dataclasses import dataclass
from typing import Optional

import numpy as np

from .base import SparseMatrix, INDEX_DTYPE, VALUE_DTYPE, frozen_array
from .coo import CooMatrix
from .csr import CsrMatrix
from ..config import ell_max_slots
from ..errors import DimensionMismatch, EllBlowup


@dataclass(frozen=True, eq=False, repr=False)
class EllMatrix(SparseMatrix):
    """ELLPACK storage: COEF/JCOEF are n_rows x width, kept column-major.

    coef[slot * n_rows + row] is slot `slot` of row `row`. Unused slots hold
    value 0.0 and the sentinel column index n_cols.
    """
    n_rows: int
    n_cols: int
    width: int
    coef: np.ndarray
    jcoef: np.ndarray

    format_name = "ell"

    def __post_init__(self):
        coef = frozen_array(self.coef, VALUE_DTYPE)
        jcoef = frozen_array(self.jcoef, INDEX_DTYPE)
        expected = self.n_rows * self.width
        if coef.size != expected or jcoef.size != expected:
            raise DimensionMismatch(
                f"ELL arrays must hold n_rows*width = {expected} slots, got {coef.size}/{jcoef.size}"
            )
        if expected and (jcoef.min() < 0 or jcoef.max() > self.n_cols):
            raise ValueError(f"JCOEF entries must lie in [0, {self.n_cols}]")
        if np.any(coef[jcoef == self.n_cols] != 0.0):
            raise ValueError("padded ELL slots must carry value 0.0")
        object.__setattr__(self, "coef", coef)
        object.__setattr__(self, "jcoef", jcoef)

    @property
    def sentinel(self) -> int:
        return self.n_cols

    @property
    def nnz(self) -> int:
        return int(np.count_nonzero(self.jcoef != self.sentinel))

    def coef_rows(self) -> np.ndarray:
        """COEF as an n_rows x width array (row view of the column-major store)"""
        return self.coef.reshape(self.width, self.n_rows).T

    def jcoef_rows(self) -> np.ndarray:
        return self.jcoef.reshape(self.width, self.n_rows).T

    def to_coo(self) -> CooMatrix:
        stored = np.flatnonzero(self.jcoef != self.sentinel)
        rows = stored % self.n_rows if self.n_rows else stored
        return CooMatrix(self.n_rows, self.n_cols, rows, self.jcoef[stored], self.coef[stored])

    def __eq__(self, other) -> bool:
        if not isinstance(other, EllMatrix):
            return NotImplemented
        return (
            self.shape == other.shape
            and self.width == other.width
            and np.array_equal(self.coef, other.coef)
            and np.array_equal(self.jcoef, other.jcoef)
        )

    __hash__ = None


def ell_from_csr(m: CsrMatrix, width: int) -> EllMatrix:
    """Store the first `width` entries of every row; longer rows are truncated"""
    if width < 0:
        raise ValueError(f"ELL width must be >= 0, got {width}")
    coef = np.zeros(m.n_rows * width, dtype=VALUE_DTYPE)
    jcoef = np.full(m.n_rows * width, m.n_cols, dtype=INDEX_DTYPE)
    keep = m.entry_slots < width
    positions = m.entry_slots[keep] * m.n_rows + m.entry_rows[keep]
    coef[positions] = m.values[keep]
    jcoef[positions] = m.col_idx[keep]
    return EllMatrix(m.n_rows, m.n_cols, width, coef, jcoef)


def csr_to_ell(m: CsrMatrix, max_slots: Optional[int] = None) -> EllMatrix:
    """Full ELL: width is the largest row nonzero count"""
    width = int(m.row_nnz.max()) if m.n_rows else 0
    cap = ell_max_slots() if max_slots is None else max_slots
    if m.n_rows * width > cap:
        raise EllBlowup(m.n_rows, width, cap)
    return ell_from_csr(m, width)
