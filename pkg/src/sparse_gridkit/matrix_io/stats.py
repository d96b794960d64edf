import numpy as np

from ..formats.base import SparseMatrix
from ..schemas.report import MatrixStats


def compute_stats(m: SparseMatrix) -> MatrixStats:
    """Dimension, fill and per-row nonzero spread of a matrix"""
    coo = m.to_coo()
    h = coo.n_rows
    nz = coo.nnz
    counts = coo.row_counts()
    density = nz / float(h * coo.n_cols) if h and coo.n_cols else 0.0
    if nz:
        bandwidth = int(np.max(np.abs(coo.col_idx - coo.row_idx)))
    else:
        bandwidth = 0
    return MatrixStats(
        h=h,
        nz=nz,
        density=density,
        density_percent=100.0 * density,
        max_row=int(counts.max()) if h else 0,
        densest_row=int(np.argmax(counts)) if h else -1,
        bandwidth=bandwidth,
        nz_per_h_mean=nz / h if h else 0.0,
        # population stddev
        nz_per_h_stddev=float(np.std(counts)) if h else 0.0,
    )
