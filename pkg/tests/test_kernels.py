import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from src.sparse_gridkit.errors import DimensionMismatch
from src.sparse_gridkit.formats import CooMatrix, build_coo, convert, to_dense
from src.sparse_gridkit.kernels import (
    blocks_for_length,
    compute_grid,
    copy,
    daxpy,
    dot,
    grid_spmv_blocks,
    norm2,
    scal,
    scal_elementwise,
    schedule_blocks,
    spmv,
    tree_reduce_lanes,
    xpay,
)
from src.sparse_gridkit.schemas import DeviceLimits, ExecPolicy, GridStrategy

from .conftest import SAMPLE_POLICIES, random_coo

SPMV_FORMATS = ("coo", "csr", "ell", "hyb")


class TestGridArithmetic:
    def test_spmv_blocks_examples(self):
        policy = ExecPolicy(block_size=256, workers_per_row=8)
        assert grid_spmv_blocks(5, policy) == 1
        assert grid_spmv_blocks(0, policy) == 0
        assert grid_spmv_blocks(101492, policy) == 3172

    @pytest.mark.parametrize("policy", SAMPLE_POLICIES[:8], ids=lambda p: p.label())
    def test_spmv_blocks_sweep(self, policy):
        tw, ntb = policy.workers_per_row, policy.block_size
        for n in range(0, 100_001, 13):
            blocks = grid_spmv_blocks(n, policy)
            assert blocks == (tw * n + ntb - 1) // ntb
            assert blocks * ntb >= tw * n

    def test_negative_rows(self):
        with pytest.raises(ValueError):
            grid_spmv_blocks(-1, ExecPolicy())

    def test_blocks_for_length(self):
        assert blocks_for_length(0, 256) == 0
        assert blocks_for_length(1, 256) == 1
        assert blocks_for_length(256, 256) == 1
        assert blocks_for_length(257, 256) == 2

    def test_compute_grid_examples(self):
        assert (compute_grid(1000, GridStrategy.FLAT_X).x, compute_grid(1000, GridStrategy.FLAT_X).y) == (1000, 1)
        flat = compute_grid(70000, GridStrategy.FLAT_X)
        assert (flat.x, flat.y, flat.z) == (65535, 2, 1)
        square = compute_grid(70000, GridStrategy.SQUARE)
        assert (square.x, square.y, square.z) == (265, 265, 1)

    def test_compute_grid_rejects_zero(self):
        with pytest.raises(ValueError):
            compute_grid(0)

    @settings(max_examples=300, deadline=None)
    @given(
        required=st.integers(1, 10**8),
        max_x=st.integers(1, 70000),
        strategy=st.sampled_from(list(GridStrategy)),
    )
    def test_compute_grid_covers(self, required, max_x, strategy):
        grid = compute_grid(required, strategy, DeviceLimits(max_grid_x=max_x))
        assert grid.x * grid.y >= required
        assert grid.x <= max_x
        assert grid.z == 1

    def test_schedule_covers_every_block_once(self):
        limits = DeviceLimits(max_grid_x=7)
        for strategy in GridStrategy:
            policy = ExecPolicy(grid_strategy=strategy, worker_count=3)
            ranges = schedule_blocks(50, policy, limits)
            covered = [b for lo, hi in ranges for b in range(lo, hi)]
            assert covered == list(range(50))
        assert schedule_blocks(0, ExecPolicy()) == []


class TestVectorKernels:
    def test_daxpy(self):
        y = np.ones(3)
        daxpy(2.0, np.array([1.0, 2.0, 3.0]), y)
        assert y.tolist() == [3.0, 5.0, 7.0]

    def test_daxpy_zero_alpha_and_cancellation(self):
        y = np.array([1.5, -2.0])
        daxpy(0.0, np.array([7.0, 8.0]), y)
        assert y.tolist() == [1.5, -2.0]
        daxpy(1.0, -y.copy(), y)
        assert not y.any()

    def test_daxpy_length_mismatch(self):
        with pytest.raises(DimensionMismatch):
            daxpy(1.0, np.ones(3), np.ones(4))

    def test_xpay_scal_copy(self):
        y = np.array([1.0, 2.0])
        xpay(np.array([10.0, 20.0]), 0.5, y)
        assert y.tolist() == [10.5, 21.0]
        scal(2.0, y)
        assert y.tolist() == [21.0, 42.0]
        out = np.empty(2)
        copy(y, out)
        assert out.tolist() == [21.0, 42.0]

    def test_scal_elementwise(self):
        a = np.array([2.0, 3.0])
        scal_elementwise(a, np.array([4.0, 5.0]))
        assert a.tolist() == [8.0, 15.0]
        a = np.array([2.0, 3.0])
        scal_elementwise(a, np.ones(2))
        assert a.tolist() == [2.0, 3.0]
        with pytest.raises(DimensionMismatch):
            scal_elementwise(a, np.ones(3))

    def test_dot(self):
        assert dot(np.array([1.0, 2.0, 3.0]), np.array([4.0, 5.0, 6.0])) == 32.0
        assert dot(np.ones(5), np.zeros(5)) == 0.0
        assert dot(np.empty(0), np.empty(0)) == 0.0

    @pytest.mark.parametrize("policy", SAMPLE_POLICIES, ids=lambda p: p.label())
    def test_dot_large_exact(self, policy):
        ones = np.ones(100_000)
        assert dot(ones, ones, policy) == 100000.0

    def test_dot_matches_sequential_sum(self):
        rng = np.random.default_rng(3)
        x, y = rng.uniform(0.5, 1.5, 50_000), rng.uniform(0.5, 1.5, 50_000)
        expected = math.fsum(x * y)
        for policy in SAMPLE_POLICIES:
            assert abs(dot(x, y, policy) - expected) <= 1e-12 * expected

    def test_dot_blocks_independent_of_workers(self):
        rng = np.random.default_rng(4)
        x, y = rng.standard_normal(70_000), rng.standard_normal(70_000)
        results = {dot(x, y, ExecPolicy(block_size=128, worker_count=w)) for w in (1, 2, 3, 8)}
        assert len(results) == 1

    def test_norm2(self):
        assert norm2(np.zeros(4)) == 0.0
        assert norm2(np.array([3.0, 4.0])) == 5.0
        assert norm2(np.array([0.0, 1.0, 0.0])) == 1.0


class TestSpmv:
    @pytest.mark.parametrize("fmt", SPMV_FORMATS)
    def test_worked_row_sums(self, worked, fmt):
        m = convert(worked, fmt)
        assert spmv(m, np.ones(5)).tolist() == [9.0, 9.0, 12.0, 15.0, 22.0]
        assert spmv(m, np.eye(5)[0]).tolist() == [-5.0, 0.0, 2.0, 0.0, 0.0]

    @pytest.mark.parametrize("fmt", SPMV_FORMATS + ("dense",))
    def test_identity(self, fmt):
        eye = convert(build_coo([(i, i, 1.0) for i in range(4)], 4, 4), fmt)
        x = np.array([1.5, -2.0, 3.25, 0.0])
        for policy in SAMPLE_POLICIES:
            assert spmv(eye, x, policy).tolist() == x.tolist()

    def test_dimension_mismatch(self, worked):
        with pytest.raises(DimensionMismatch):
            spmv(worked, np.ones(4))
        with pytest.raises(DimensionMismatch):
            spmv(worked, np.ones(5), out=np.zeros(3))

    def test_writes_into_out(self, worked_csr):
        out = np.full(5, 99.0)
        result = spmv(worked_csr, np.ones(5), out=out)
        assert result is out
        assert out.tolist() == [9.0, 9.0, 12.0, 15.0, 22.0]

    def test_tree_reduce_order(self):
        lanes = np.array([[1.0, 2.0, 3.0, 4.0], [1e16, 1.0, -1e16, 1.0]])
        # (l0 + l2) + (l1 + l3)
        assert tree_reduce_lanes(lanes).tolist() == [10.0, 2.0]

    def test_more_lanes_than_entries(self):
        m = convert(build_coo([(0, 0, 2.0), (1, 1, 3.0)], 2, 2), "csr")
        assert spmv(m, np.ones(2), ExecPolicy(workers_per_row=32)).tolist() == [2.0, 3.0]

    def test_integer_data_is_exact_for_every_format_and_policy(self):
        # integer products and sums stay exact, so any order must reproduce the dense result
        rng = np.random.default_rng(11)
        for _ in range(100):
            n = int(rng.integers(1, 201))
            count = int(rng.integers(0, int(0.2 * n * n) + 1))
            m = CooMatrix(n, n, rng.integers(0, n, count), rng.integers(0, n, count),
                          rng.integers(-1000, 1001, count).astype(float))
            x = rng.integers(-8, 9, n).astype(float)
            expected = to_dense(m).as_array() @ x
            for fmt in SPMV_FORMATS:
                converted = convert(m, fmt)
                for policy in SAMPLE_POLICIES:
                    np.testing.assert_array_equal(spmv(converted, x, policy), expected)

    def test_float_data_matches_dense_oracle(self):
        rng = np.random.default_rng(12)
        for _ in range(100):
            n = int(rng.integers(1, 201))
            m = random_coo(rng, n, n, float(rng.uniform(0.0, 0.2)))
            x = rng.uniform(-1.0, 1.0, n)
            dense = to_dense(m).as_array()
            expected = dense @ x
            # rounding is bounded by the absolute row sums
            scale = 1.0 + np.abs(dense) @ np.abs(x)
            for fmt in SPMV_FORMATS:
                converted = convert(m, fmt)
                for policy in SAMPLE_POLICIES:
                    y = spmv(converted, x, policy)
                    assert np.max(np.abs(y - expected) / scale) <= 1e-13

    def test_repeatable_and_independent_of_worker_count(self):
        rng = np.random.default_rng(13)
        m = random_coo(rng, 3000, 3000, 0.01)
        x = rng.standard_normal(3000)
        for fmt in SPMV_FORMATS:
            converted = convert(m, fmt)
            reference = spmv(converted, x, ExecPolicy(block_size=64, workers_per_row=4, worker_count=1))
            for workers in (1, 2, 5):
                policy = ExecPolicy(block_size=64, workers_per_row=4, worker_count=workers)
                np.testing.assert_array_equal(spmv(converted, x, policy), reference)
                np.testing.assert_array_equal(spmv(converted, x, policy), reference)

    def test_policy_invariance(self):
        rng = np.random.default_rng(14)
        m = convert(random_coo(rng, 500, 500, 0.05), "csr")
        x = rng.standard_normal(500)
        dense = to_dense(m).as_array()
        scale = 1.0 + np.abs(dense) @ np.abs(x)
        reference = spmv(m, x, ExecPolicy())
        for policy in SAMPLE_POLICIES:
            assert np.max(np.abs(spmv(m, x, policy) - reference) / scale) <= 1e-12

    def test_parallel_path_matches_inline(self):
        # large enough to cross the parallel threshold
        rng = np.random.default_rng(15)
        m = convert(random_coo(rng, 40_000, 40_000, 0.0002), "csr")
        x = rng.standard_normal(40_000)
        inline = spmv(m, x, ExecPolicy(worker_count=1))
        np.testing.assert_array_equal(spmv(m, x, ExecPolicy(worker_count=4)), inline)

    def test_empty_matrix(self):
        m = build_coo([], 0, 3)
        for fmt in SPMV_FORMATS:
            assert spmv(convert(m, fmt), np.ones(3)).size == 0
