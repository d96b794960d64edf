"""
Storage arrays of a converted matrix as a numpy .npz archive.

Matrix Market only carries the entries; the archive keeps the layout
itself (ELL padding, HYB split) so converted matrices can be reloaded as is.
"""

from typing import Dict

import numpy as np

from ..errors import ParseError, UnsupportedField
from ..formats.base import SparseMatrix
from ..formats.coo import CooMatrix
from ..formats.csr import CsrMatrix
from ..formats.dense import DenseMatrix
from ..formats.ell import EllMatrix
from ..formats.hyb import HybMatrix
from .reports import ensure_parent


def _arrays(m: SparseMatrix, prefix: str = "") -> Dict[str, np.ndarray]:
    shape = {f"{prefix}shape": np.array(m.shape, dtype=np.int64)}
    if isinstance(m, CooMatrix):
        return {**shape, f"{prefix}row_idx": m.row_idx, f"{prefix}col_idx": m.col_idx, f"{prefix}values": m.values}
    if isinstance(m, CsrMatrix):
        return {**shape, f"{prefix}row_ptr": m.row_ptr, f"{prefix}col_idx": m.col_idx, f"{prefix}values": m.values}
    if isinstance(m, EllMatrix):
        return {**shape, f"{prefix}width": np.array([m.width]), f"{prefix}coef": m.coef, f"{prefix}jcoef": m.jcoef}
    if isinstance(m, DenseMatrix):
        return {**shape, f"{prefix}data": m.as_array().ravel()}
    raise UnsupportedField(f"cannot archive {type(m).__name__}")


def save_format(m: SparseMatrix, path: str) -> None:
    if isinstance(m, HybMatrix):
        arrays = {**_arrays(m.ell_part, "ell_"), **_arrays(m.coo_part, "coo_")}
    else:
        arrays = _arrays(m)
    ensure_parent(path)
    np.savez(path, format=np.array(m.format_name), **arrays)


def _load(fmt: str, data, prefix: str = "") -> SparseMatrix:
    if fmt not in ("coo", "csr", "ell", "dense"):
        raise UnsupportedField(f"unknown archived format '{fmt}'")
    n_rows, n_cols = (int(v) for v in data[f"{prefix}shape"])
    if fmt == "coo":
        return CooMatrix(n_rows, n_cols, data[f"{prefix}row_idx"], data[f"{prefix}col_idx"], data[f"{prefix}values"])
    if fmt == "csr":
        return CsrMatrix(n_rows, n_cols, data[f"{prefix}row_ptr"], data[f"{prefix}col_idx"], data[f"{prefix}values"])
    if fmt == "ell":
        width = int(data[f"{prefix}width"][0])
        return EllMatrix(n_rows, n_cols, width, data[f"{prefix}coef"], data[f"{prefix}jcoef"])
    return DenseMatrix(n_rows, n_cols, data[f"{prefix}data"])


def load_format(path: str) -> SparseMatrix:
    with np.load(path) as data:
        if "format" not in data.files:
            raise ParseError("archive has no 'format' entry", path=path)
        fmt = str(data["format"])
        if fmt == "hyb":
            ell = _load("ell", data, "ell_")
            coo = _load("coo", data, "coo_")
            return HybMatrix(ell, coo)
        return _load(fmt, data)
