"""
Band-row and band-column splittings of a matrix over several workers.

Band-row gives worker k the rows [k*size, (k+1)*size) with size = n // parts;
the last band also takes the remainder. Band-column cuts the columns the
same way, so every band product is a full-length partial y that has to be
summed.
"""

from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from ..errors import DimensionMismatch, EmptySubdomain
from ..formats.base import INDEX_DTYPE, SparseMatrix, VALUE_DTYPE
from ..formats.convert import to_csr
from ..formats.coo import CooMatrix
from ..formats.csr import CsrMatrix, coo_to_csr
from ..kernels.spmv import spmv
from ..schemas.policy import ExecPolicy


@dataclass(frozen=True)
class Band:
    start: int
    stop: int
    block: CsrMatrix


def band_bounds(n: int, parts: int) -> List[int]:
    if parts < 1:
        raise ValueError(f"parts must be >= 1, got {parts}")
    size = n // parts
    if size == 0:
        raise EmptySubdomain(f"{parts} bands for {n} equations leaves empty bands")
    return [k * size for k in range(parts)] + [n]


def band_row_assignment(n: int, parts: int) -> np.ndarray:
    """Subdomain id per equation for a contiguous band-row split"""
    bounds = band_bounds(n, parts)
    assignment = np.empty(n, dtype=INDEX_DTYPE)
    for k in range(parts):
        assignment[bounds[k]:bounds[k + 1]] = k
    return assignment


def band_row_split(A: SparseMatrix, parts: int) -> List[Band]:
    csr = to_csr(A)
    bounds = band_bounds(csr.n_rows, parts)
    bands = []
    for start, stop in zip(bounds[:-1], bounds[1:]):
        lo, hi = csr.row_ptr[start], csr.row_ptr[stop]
        block = CsrMatrix(stop - start, csr.n_cols, csr.row_ptr[start:stop + 1] - lo,
                          csr.col_idx[lo:hi], csr.values[lo:hi])
        bands.append(Band(start, stop, block))
    return bands


def band_row_spmv(bands: List[Band], x, policy: Optional[ExecPolicy] = None) -> np.ndarray:
    """Each band yields its own slice of y"""
    return np.concatenate([spmv(band.block, x, policy) for band in bands])


def band_column_split(A: SparseMatrix, parts: int) -> List[Band]:
    coo = to_csr(A).to_coo()
    bounds = band_bounds(coo.n_cols, parts)
    bands = []
    for start, stop in zip(bounds[:-1], bounds[1:]):
        take = (coo.col_idx >= start) & (coo.col_idx < stop)
        block = coo_to_csr(CooMatrix(coo.n_rows, stop - start, coo.row_idx[take],
                                     coo.col_idx[take] - start, coo.values[take]))
        bands.append(Band(start, stop, block))
    return bands


def band_column_spmv(bands: List[Band], x, policy: Optional[ExecPolicy] = None) -> np.ndarray:
    """y = sum over bands of band_k x[band_k columns], added left to right"""
    x = np.asarray(x, dtype=VALUE_DTYPE)
    if not bands or x.shape[0] != bands[-1].stop:
        raise DimensionMismatch(f"x has length {x.shape[0]}, bands cover {bands[-1].stop if bands else 0} columns")
    y = np.zeros(bands[0].block.n_rows, dtype=VALUE_DTYPE)
    for band in bands:
        y += spmv(band.block, x[band.start:band.stop], policy)
    return y
