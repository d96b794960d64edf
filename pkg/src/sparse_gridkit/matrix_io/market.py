"""
Matrix Market reader and writer.

Only the coordinate format with real (or integer) values is accepted.
Symmetric and skew-symmetric files store one triangle; the reader mirrors
the off-diagonal entries so the result is in full storage.
"""

import logging
from typing import List, Optional, Tuple

import numpy as np
import scipy.io
import scipy.sparse

from ..errors import ParseError, UnsupportedField
from ..formats.base import INDEX_DTYPE, SparseMatrix, VALUE_DTYPE
from ..formats.coo import CooMatrix
from .reports import ensure_parent

logger = logging.getLogger(__name__)

BANNER = "%%matrixmarket"
SUPPORTED_FIELDS = ("real", "double", "integer")
SUPPORTED_SYMMETRIES = ("general", "symmetric", "skew-symmetric")


def _parse_header(line: str, path: str) -> Tuple[str, str]:
    tokens = line.strip().lower().split()
    if not tokens or tokens[0] != BANNER:
        raise ParseError("missing %%MatrixMarket banner", line=1, path=path)
    if len(tokens) != 5:
        raise ParseError(f"banner needs 5 tokens, found {len(tokens)}", line=1, path=path)
    _, obj, fmt, field, symmetry = tokens
    if obj != "matrix":
        raise UnsupportedField(f"{path}: object '{obj}' is not a matrix")
    if fmt != "coordinate":
        raise UnsupportedField(f"{path}: '{fmt}' format is not supported, only coordinate")
    if field not in SUPPORTED_FIELDS:
        raise UnsupportedField(f"{path}: '{field}' matrices are not supported, only real")
    if symmetry not in SUPPORTED_SYMMETRIES:
        raise UnsupportedField(f"{path}: '{symmetry}' symmetry is not supported")
    return field, symmetry


def _int_tokens(tokens: List[str], count: int, line_no: int, path: str, what: str) -> List[int]:
    if len(tokens) < count:
        raise ParseError(f"{what} needs {count} integers, found {len(tokens)} tokens", line=line_no, path=path)
    try:
        return [int(t) for t in tokens[:count]]
    except ValueError:
        raise ParseError(f"{what} is not integral: {' '.join(tokens[:count])}", line=line_no, path=path)


def read_matrix_market(path: str) -> CooMatrix:
    """Read a coordinate real Matrix Market file into canonical COO (0-based)"""
    rows: List[int] = []
    cols: List[int] = []
    values: List[float] = []
    n_rows = n_cols = n_entries = None
    symmetry = "general"
    last_line = 0

    with open(path, "r") as f:
        for line_no, line in enumerate(f, 1):
            last_line = line_no
            if line_no == 1:
                _, symmetry = _parse_header(line, path)
                continue
            text = line.strip()
            if not text or text.startswith("%"):
                continue
            tokens = text.split()

            if n_rows is None:
                n_rows, n_cols, n_entries = _int_tokens(tokens, 3, line_no, path, "size line")
                if min(n_rows, n_cols, n_entries) < 0:
                    raise ParseError("negative size", line=line_no, path=path)
                if symmetry != "general" and n_rows != n_cols:
                    raise ParseError(f"{symmetry} matrix must be square", line=line_no, path=path)
                continue

            if len(rows) >= n_entries:
                raise ParseError(f"more than the declared {n_entries} entries", line=line_no, path=path)
            i, j = _int_tokens(tokens, 2, line_no, path, "entry")
            if len(tokens) < 3:
                raise ParseError("entry has no value", line=line_no, path=path)
            try:
                v = float(tokens[2])
            except ValueError:
                raise ParseError(f"value {tokens[2]!r} is not a real number", line=line_no, path=path)
            if not (1 <= i <= n_rows and 1 <= j <= n_cols):
                raise ParseError(
                    f"index ({i}, {j}) outside the declared {n_rows}x{n_cols} matrix", line=line_no, path=path
                )
            rows.append(i - 1)
            cols.append(j - 1)
            values.append(v)

    if last_line == 0:
        raise ParseError("empty file", line=1, path=path)
    if n_rows is None:
        raise ParseError("missing size line", line=last_line, path=path)
    if len(rows) != n_entries:
        raise ParseError(f"expected {n_entries} entries, found {len(rows)}", line=last_line, path=path)

    r = np.array(rows, dtype=INDEX_DTYPE)
    c = np.array(cols, dtype=INDEX_DTYPE)
    v = np.array(values, dtype=VALUE_DTYPE)
    if symmetry != "general":
        off = r != c
        mirrored = -v[off] if symmetry == "skew-symmetric" else v[off]
        r, c, v = np.concatenate((r, c[off])), np.concatenate((c, r[off])), np.concatenate((v, mirrored))

    matrix = CooMatrix(n_rows, n_cols, r, c, v)
    logger.info("Read %s: %dx%d, %d stored entries, nnz %d (%s)",
                path, n_rows, n_cols, n_entries, matrix.nnz, symmetry)
    return matrix


def write_matrix_market(m: SparseMatrix, path: str, symmetric: bool = False,
                        comment: Optional[str] = None) -> None:
    """Write coordinate real format; values keep full float64 precision.

    With symmetric=True only the lower triangle is stored, the caller
    asserts that the matrix is symmetric.
    """
    coo = m.to_coo()
    keep = coo.row_idx >= coo.col_idx if symmetric else np.ones(coo.nnz, dtype=bool)
    matrix = scipy.sparse.coo_matrix(
        (coo.values[keep], (coo.row_idx[keep], coo.col_idx[keep])), shape=coo.shape
    )
    ensure_parent(path)
    with open(path, "wb") as f:
        scipy.io.mmwrite(
            f,
            matrix,
            comment=comment or "",
            field="real",
            precision=17,
            symmetry="symmetric" if symmetric else "general",
        )
    logger.info("Wrote %s: %dx%d, nnz %d", path, coo.n_rows, coo.n_cols, coo.nnz)
