"""
Sparse storage formats: COO, CSR, ELL, HYB and the dense oracle.
"""

from .base import SparseMatrix, INDEX_DTYPE, VALUE_DTYPE
from .coo import CooMatrix, build_coo, coo_from_arrays, coo_from_scipy
from .csr import CsrMatrix, coo_to_csr, csr_to_coo, transpose
from .ell import EllMatrix, csr_to_ell, ell_from_csr
from .hyb import HybMatrix, csr_to_hyb, auto_hyb_width
from .dense import DenseMatrix, dense_mv, dense_to_coo
from .convert import FORMATS, convert, to_csr, to_dense, diagonal

__all__ = [
    "SparseMatrix", "INDEX_DTYPE", "VALUE_DTYPE",
    "CooMatrix", "build_coo", "coo_from_arrays", "coo_from_scipy",
    "CsrMatrix", "coo_to_csr", "csr_to_coo", "transpose",
    "EllMatrix", "csr_to_ell", "ell_from_csr",
    "HybMatrix", "csr_to_hyb", "auto_hyb_width",
    "DenseMatrix", "dense_mv", "dense_to_coo",
    "FORMATS", "convert", "to_csr", "to_dense", "diagonal",
]
