from typing import Optional, Union

import numpy as np

from .base import SparseMatrix, VALUE_DTYPE
from .coo import CooMatrix
from .csr import CsrMatrix, coo_to_csr
from .dense import DenseMatrix
from .ell import csr_to_ell
from .hyb import csr_to_hyb

FORMATS = ("coo", "csr", "ell", "hyb", "dense")


def to_csr(m: SparseMatrix) -> CsrMatrix:
    if isinstance(m, CsrMatrix):
        return m
    return coo_to_csr(m.to_coo())


def to_dense(m: SparseMatrix) -> DenseMatrix:
    """Lossless expansion of any format"""
    return m.to_dense()


def convert(
    m: SparseMatrix,
    fmt: str,
    hyb_width: Union[int, str, None] = "auto",
    max_slots: Optional[int] = None,
) -> SparseMatrix:
    """Move the entries of `m` into storage scheme `fmt` (values are never recomputed)"""
    fmt = fmt.lower()
    if fmt not in FORMATS:
        raise ValueError(f"unknown format '{fmt}', expected one of {FORMATS}")
    if fmt == "dense":
        return m.to_dense()
    if fmt == "coo":
        return m.to_coo()
    csr = to_csr(m)
    if fmt == "csr":
        return csr
    if fmt == "ell":
        return csr_to_ell(csr, max_slots=max_slots)
    return csr_to_hyb(csr, hyb_width)


def diagonal(m: SparseMatrix) -> np.ndarray:
    """Main diagonal; absent entries read as 0.0"""
    coo: CooMatrix = m.to_coo()
    diag = np.zeros(min(m.n_rows, m.n_cols), dtype=VALUE_DTYPE)
    on_diag = coo.row_idx == coo.col_idx
    diag[coo.row_idx[on_diag]] = coo.values[on_diag]
    return diag
