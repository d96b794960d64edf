from dataclasses import dataclass
from typing import Union

import numpy as np

from .base import SparseMatrix
from .coo import CooMatrix
from .csr import CsrMatrix
from .ell import EllMatrix, ell_from_csr
from ..errors import DimensionMismatch

# fraction of rows the ELL part must hold completely under the auto rule
AUTO_ROW_COVERAGE = 2.0 / 3.0


@dataclass(frozen=True, eq=False, repr=False)
class HybMatrix(SparseMatrix):
    """ELL part of width w plus the overflow entries in COO."""
    ell_part: EllMatrix
    coo_part: CooMatrix

    format_name = "hyb"

    def __post_init__(self):
        if self.ell_part.shape != self.coo_part.shape:
            raise DimensionMismatch(
                f"HYB parts differ in shape: {self.ell_part.shape} vs {self.coo_part.shape}"
            )

    @property
    def n_rows(self) -> int:
        return self.ell_part.n_rows

    @property
    def n_cols(self) -> int:
        return self.ell_part.n_cols

    @property
    def width(self) -> int:
        return self.ell_part.width

    @property
    def nnz(self) -> int:
        return self.ell_part.nnz + self.coo_part.nnz

    def to_coo(self) -> CooMatrix:
        ell = self.ell_part.to_coo()
        return CooMatrix(
            self.n_rows,
            self.n_cols,
            np.concatenate((ell.row_idx, self.coo_part.row_idx)),
            np.concatenate((ell.col_idx, self.coo_part.col_idx)),
            np.concatenate((ell.values, self.coo_part.values)),
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, HybMatrix):
            return NotImplemented
        return self.ell_part == other.ell_part and self.coo_part == other.coo_part

    __hash__ = None


def auto_hyb_width(row_nnz: np.ndarray) -> int:
    """Smallest w such that at least 2/3 of the rows have nnz <= w"""
    row_nnz = np.asarray(row_nnz)
    if row_nnz.size == 0:
        return 0
    counts = np.bincount(row_nnz)
    covered = np.cumsum(counts)
    needed = AUTO_ROW_COVERAGE * row_nnz.size
    return int(np.flatnonzero(covered >= needed)[0])


def csr_to_hyb(m: CsrMatrix, width: Union[int, str, None] = "auto") -> HybMatrix:
    """Split each row: first min(w, nnz) entries to ELL, the rest to COO"""
    if width is None or width == "auto":
        width = auto_hyb_width(m.row_nnz)
    width = int(width)
    if width < 0:
        raise ValueError(f"HYB width must be >= 0, got {width}")
    overflow = m.entry_slots >= width
    coo_part = CooMatrix(
        m.n_rows, m.n_cols, m.entry_rows[overflow], m.col_idx[overflow], m.values[overflow]
    )
    return HybMatrix(ell_from_csr(m, width), coo_part)
