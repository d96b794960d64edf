import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from src.sparse_gridkit.errors import DimensionMismatch, EllBlowup, IndexOutOfRange
from src.sparse_gridkit.formats import (
    FORMATS,
    CooMatrix,
    CsrMatrix,
    DenseMatrix,
    auto_hyb_width,
    build_coo,
    convert,
    coo_to_csr,
    csr_to_coo,
    csr_to_ell,
    csr_to_hyb,
    diagonal,
    to_dense,
    transpose,
)

from .conftest import WORKED_COLS, WORKED_DENSE, WORKED_ROWS, WORKED_VALUES, random_coo


class TestCoo:
    def test_worked_arrays(self, worked):
        assert worked.row_idx.tolist() == WORKED_ROWS
        assert worked.col_idx.tolist() == WORKED_COLS
        assert worked.values.tolist() == WORKED_VALUES

    def test_empty(self):
        m = build_coo([], 3, 4)
        assert m.nnz == 0
        assert m.shape == (3, 4)

    def test_duplicates_are_summed(self):
        m = build_coo([(0, 0, 1.0), (0, 0, 2.0)], 2, 2)
        assert m.nnz == 1
        assert m.values.tolist() == [3.0]
        assert to_dense(m).as_array()[0, 0] == 3.0

    def test_index_out_of_range(self):
        with pytest.raises(IndexOutOfRange):
            build_coo([(0, 0, 1.0), (2, 0, 1.0)], 2, 2)
        with pytest.raises(IndexOutOfRange):
            build_coo([(0, -1, 1.0)], 2, 2)

    def test_mismatched_arrays(self):
        with pytest.raises(DimensionMismatch):
            CooMatrix(2, 2, [0, 1], [0], [1.0, 2.0])

    def test_arrays_are_read_only(self, worked):
        with pytest.raises(ValueError):
            worked.values[0] = 1.0


class TestCsr:
    def test_worked_arrays(self, worked_csr):
        assert worked_csr.values.tolist() == WORKED_VALUES
        assert worked_csr.col_idx.tolist() == WORKED_COLS
        assert worked_csr.row_ptr.tolist() == [0, 2, 4, 6, 9, 11]

    def test_empty_rows(self):
        csr = coo_to_csr(build_coo([], 3, 3))
        assert csr.row_ptr.tolist() == [0, 0, 0, 0]

    def test_random_dense_agreement(self):
        m = random_coo(np.random.default_rng(1), 50, 50, 0.1)
        np.testing.assert_array_equal(to_dense(coo_to_csr(m)).as_array(), to_dense(m).as_array())

    def test_canonical_round_trip(self, worked_csr):
        assert coo_to_csr(csr_to_coo(worked_csr)) == worked_csr

    def test_bad_row_ptr(self):
        with pytest.raises((DimensionMismatch, ValueError)):
            CsrMatrix(2, 2, [0, 2], [0, 1], [1.0, 2.0])

    def test_transpose(self, worked_csr):
        np.testing.assert_array_equal(to_dense(transpose(worked_csr)).as_array(), WORKED_DENSE.T)


class TestEll:
    def test_worked_layout(self, worked_csr):
        ell = csr_to_ell(worked_csr)
        pad = ell.sentinel
        assert ell.width == 3
        assert pad == 5
        assert ell.coef_rows().tolist() == [
            [-5, 14, 0], [8, 1, 0], [2, 10, 0], [4, 2, 9], [15, 7, 0],
        ]
        assert ell.jcoef_rows().tolist() == [
            [0, 1, pad], [1, 2, pad], [0, 2, pad], [1, 3, 4], [2, 4, pad],
        ]

    def test_column_major(self):
        # value = 100 * row + slot
        triples = [(r, c, 100.0 * r + c) for r in range(4) for c in range(r + 1)]
        ell = csr_to_ell(coo_to_csr(build_coo(triples, 4, 4)))
        for row in range(4):
            for slot in range(row + 1):
                assert ell.coef[slot * ell.n_rows + row] == 100.0 * row + slot

    def test_diagonal_width(self):
        eye = build_coo([(i, i, 1.0) for i in range(4)], 4, 4)
        assert csr_to_ell(coo_to_csr(eye)).width == 1

    def test_blowup(self):
        triples = [(0, c, 1.0) for c in range(100)] + [(r, r, 1.0) for r in range(1, 100)]
        csr = coo_to_csr(build_coo(triples, 100, 100))
        with pytest.raises(EllBlowup):
            csr_to_ell(csr, max_slots=9999)
        assert csr_to_ell(csr, max_slots=10000).width == 100

    def test_blowup_from_environment(self, monkeypatch):
        monkeypatch.setenv("SPARSE_GRIDKIT_ELL_MAX_SLOTS", "10")
        with pytest.raises(EllBlowup):
            csr_to_ell(coo_to_csr(build_coo([(i, i, 1.0) for i in range(11)], 11, 11)))


class TestHyb:
    def test_worked_width2(self, worked_csr):
        hyb = csr_to_hyb(worked_csr, 2)
        pad = hyb.ell_part.sentinel
        assert hyb.ell_part.coef_rows().tolist() == [[-5, 14], [8, 1], [2, 10], [4, 2], [15, 7]]
        assert hyb.ell_part.jcoef_rows().tolist() == [[0, 1], [1, 2], [0, 2], [1, 3], [2, 4]]
        assert pad == 5
        assert hyb.coo_part.values.tolist() == [9.0]
        assert hyb.coo_part.col_idx.tolist() == [4]
        assert hyb.coo_part.row_idx.tolist() == [3]

    def test_full_width_is_ell(self, worked_csr):
        assert csr_to_hyb(worked_csr, 3).coo_part.nnz == 0

    def test_zero_width_is_coo(self, worked_csr):
        hyb = csr_to_hyb(worked_csr, 0)
        assert hyb.ell_part.nnz == 0
        assert hyb.coo_part == csr_to_coo(worked_csr)

    @pytest.mark.parametrize("width", [0, 1, 2, 3, 4])
    def test_partition_keeps_every_entry(self, worked_csr, width):
        hyb = csr_to_hyb(worked_csr, width)
        assert hyb.ell_part.nnz + hyb.coo_part.nnz == worked_csr.nnz
        assert hyb.to_coo() == csr_to_coo(worked_csr)

    def test_auto_width(self):
        # two thirds of the rows have at most 2 entries
        assert auto_hyb_width(np.array([1, 2, 2, 3, 9, 2])) == 2
        assert auto_hyb_width(np.array([], dtype=int)) == 0
        assert auto_hyb_width(np.array([2, 2, 2, 3, 2])) == 2


class TestConversions:
    def test_dense_worked(self, worked_csr):
        np.testing.assert_array_equal(to_dense(worked_csr).as_array(), WORKED_DENSE)

    def test_empty_dense(self):
        assert not to_dense(build_coo([], 3, 2)).as_array().any()

    def test_diagonal(self, worked):
        assert diagonal(worked).tolist() == [-5.0, 8.0, 10.0, 2.0, 7.0]
        assert diagonal(build_coo([(0, 1, 1.0)], 2, 2)).tolist() == [0.0, 0.0]

    def test_unknown_format(self, worked):
        with pytest.raises(ValueError):
            convert(worked, "dia")

    def test_dense_round_trip(self):
        dense = DenseMatrix.from_array(WORKED_DENSE)
        assert to_dense(convert(dense, "ell")) == dense


@st.composite
def sparse_matrices(draw):
    n_rows = draw(st.integers(0, 30))
    n_cols = draw(st.integers(1, 30))
    count = draw(st.integers(0, 60)) if n_rows else 0
    rows = draw(st.lists(st.integers(0, max(n_rows - 1, 0)), min_size=count, max_size=count))
    cols = draw(st.lists(st.integers(0, n_cols - 1), min_size=count, max_size=count))
    values = draw(st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=count, max_size=count))
    return CooMatrix(n_rows, n_cols, rows, cols, values)


@settings(max_examples=60, deadline=None)
@given(sparse_matrices())
def test_every_format_expands_to_the_same_dense(m):
    reference = to_dense(m).as_array()
    for fmt in FORMATS:
        np.testing.assert_array_equal(to_dense(convert(m, fmt)).as_array(), reference)
