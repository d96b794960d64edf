import numpy as np
import pytest

from src.sparse_gridkit.errors import Breakdown, DimensionMismatch, SolverError, ZeroDiagonal
from src.sparse_gridkit.formats import build_coo, convert
from src.sparse_gridkit.matrix_io import build_test_matrix
from src.sparse_gridkit.schemas import ExecPolicy, Preconditioner, SolverConfig
from src.sparse_gridkit.solvers import SOLVERS, JacobiPreconditioner, solve

from .conftest import tridiagonal

ALL_METHODS = sorted(SOLVERS)
NONSYMMETRIC_METHODS = ("gcr", "bicgcr", "tfqmr", "bicgstab", "bicgstabl")


def _dense_to_coo(dense):
    dense = np.asarray(dense, dtype=float)
    rows, cols = np.nonzero(dense)
    return build_coo(list(zip(rows, cols, dense[rows, cols])), *dense.shape)


class TestSmallSystems:
    @pytest.mark.parametrize("method", ALL_METHODS)
    def test_two_by_two_spd(self, method):
        A = convert(_dense_to_coo([[4.0, 1.0], [1.0, 3.0]]), "csr")
        report = solve(method, A, [1.0, 2.0], cfg=SolverConfig(tolerance=1e-12))
        assert report.converged
        np.testing.assert_allclose(report.solution, [1.0 / 11.0, 7.0 / 11.0], rtol=1e-8)

    @pytest.mark.parametrize("method", NONSYMMETRIC_METHODS)
    def test_two_by_two_nonsymmetric(self, method):
        A = convert(_dense_to_coo([[2.0, 1.0], [0.0, 1.0]]), "csr")
        report = solve(method, A, [3.0, 1.0], cfg=SolverConfig(tolerance=1e-12))
        assert report.converged
        np.testing.assert_allclose(report.solution, [1.0, 1.0], rtol=1e-8)

    @pytest.mark.parametrize("method", ALL_METHODS)
    @pytest.mark.parametrize("precond", list(Preconditioner))
    def test_scaled_identity_in_one_iteration(self, method, precond):
        A = build_coo([(i, i, 3.0) for i in range(6)], 6, 6)
        b = np.arange(1.0, 7.0)
        report = solve(method, A, b, cfg=SolverConfig(preconditioner=precond))
        assert report.converged
        assert report.iterations <= 1
        np.testing.assert_allclose(report.solution, b / 3.0, rtol=1e-14)

    @pytest.mark.parametrize("method", ALL_METHODS)
    def test_diagonal_with_jacobi(self, method):
        diag = np.array([1.0, 2.0, 5.0, 0.5, 10.0])
        A = build_coo([(i, i, d) for i, d in enumerate(diag)], 5, 5)
        report = solve(method, A, np.ones(5))
        assert report.converged
        if method == "cg-classic":
            # unpreconditioned: one step per distinct eigenvalue
            assert report.iterations <= 5
            np.testing.assert_allclose(report.solution, 1.0 / diag, rtol=1e-4)
        else:
            assert report.iterations == 1
            np.testing.assert_allclose(report.solution, 1.0 / diag, rtol=1e-12)

    @pytest.mark.parametrize("method", ALL_METHODS)
    def test_zero_rhs(self, method):
        report = solve(method, tridiagonal(8), np.zeros(8))
        assert report.converged
        assert report.iterations == 0
        assert not report.solution.any()

    @pytest.mark.parametrize("method", ALL_METHODS)
    def test_exact_initial_guess(self, method):
        A = tridiagonal(6)
        x = np.arange(6.0)
        b = convert(A, "dense").as_array() @ x
        report = solve(method, A, b, x0=x)
        assert report.converged
        assert report.iterations == 0


class TestConvergence:
    @pytest.mark.parametrize("n", [5, 20, 50])
    @pytest.mark.parametrize("method", ["cg", "cg-classic"])
    def test_tridiagonal_within_n_iterations(self, n, method):
        A = convert(tridiagonal(n), "csr")
        report = solve(method, A, np.ones(n), cfg=SolverConfig(tolerance=1e-8))
        assert report.converged
        assert report.iterations <= n
        residual = np.ones(n) - convert(A, "dense").as_array() @ report.solution
        assert np.linalg.norm(residual) <= 1e-6

    @pytest.mark.parametrize("method", NONSYMMETRIC_METHODS)
    def test_convection_diffusion(self, method):
        A = convert(build_test_matrix("convdiff2d", 16), "csr")
        b = np.ones(A.n_rows)
        report = solve(method, A, b, cfg=SolverConfig(tolerance=1e-8))
        assert report.converged
        assert len(report.residual_history) == report.iterations
        residual = b - convert(A, "dense").as_array() @ report.solution
        assert np.linalg.norm(residual) / np.linalg.norm(b) <= 1e-5

    def test_gcr_restart(self):
        A = convert(build_test_matrix("convdiff2d", 12), "csr")
        report = solve("gcr", A, np.ones(A.n_rows), cfg=SolverConfig(restart=3, tolerance=1e-8))
        assert report.converged
        assert report.iterations > 3

    def test_gcr_residual_never_increases_within_a_cycle(self):
        A = convert(build_test_matrix("convdiff2d", 16), "csr")
        restart = 7
        report = solve("gcr", A, np.ones(A.n_rows), cfg=SolverConfig(restart=restart, tolerance=1e-10))
        assert report.converged
        history = report.residual_history
        for start in range(0, len(history), restart):
            cycle = history[start:start + restart]
            assert all(later <= earlier * (1.0 + 1e-12) for earlier, later in zip(cycle, cycle[1:]))

    def test_tfqmr_stagnating_bound_restarts_instead_of_breaking_down(self):
        A = convert(build_test_matrix("convdiff2d", 32), "csr")
        b = np.ones(A.n_rows)
        report = solve("tfqmr", A, b, cfg=SolverConfig(tolerance=1e-6))
        assert report.converged
        assert np.all(np.isfinite(report.residual_history))
        residual = b - convert(A, "dense").as_array() @ report.solution
        assert np.linalg.norm(residual) / np.linalg.norm(b) <= 1e-4

    def test_tfqmr_history_is_finite_on_diagonally_dominant(self):
        rng = np.random.default_rng(21)
        dense = rng.uniform(-1.0, 1.0, (50, 50)) * (rng.random((50, 50)) < 0.2)
        np.fill_diagonal(dense, 0.0)
        np.fill_diagonal(dense, np.abs(dense).sum(axis=1) + 1.0)
        b = rng.standard_normal(50)
        report = solve("tfqmr", _dense_to_coo(dense), b, cfg=SolverConfig(tolerance=1e-10))
        assert report.converged
        assert not np.isnan(report.residual_history).any()
        assert np.all(np.isfinite(report.residual_history))
        np.testing.assert_allclose(report.solution, np.linalg.solve(dense, b), rtol=1e-7, atol=1e-9)

    @pytest.mark.parametrize("method", ALL_METHODS)
    def test_converged_solution_meets_residual_check(self, method):
        kind = "convdiff2d" if method in NONSYMMETRIC_METHODS else "poisson2d"
        A = convert(build_test_matrix(kind, 16), "csr")
        # rho / ||r0|| grows with ||b||; at ||b|| = 800 it bounds ||b - Ax|| / ||b|| by 100 x tolerance
        b = np.full(A.n_rows, 50.0)
        tolerance = 1e-6
        report = solve(method, A, b, cfg=SolverConfig(tolerance=tolerance))
        assert report.converged
        residual = b - convert(A, "dense").as_array() @ report.solution
        assert np.linalg.norm(residual) / np.linalg.norm(b) <= 100 * tolerance

    def test_stab_l_degrees(self):
        A = convert(build_test_matrix("convdiff2d", 32), "csr")
        b = np.ones(A.n_rows)
        reports = {degree: solve("bicgstabl", A, b, cfg=SolverConfig(stab_l=degree)) for degree in (1, 2, 8)}
        iterations = {degree: report.iterations for degree, report in reports.items()}
        assert iterations[8] <= iterations[1]
        assert iterations[2] <= iterations[1]
        plain = solve("bicgstab", A, b)
        assert abs(iterations[1] - plain.iterations) <= 2
        np.testing.assert_allclose(reports[1].solution, plain.solution, atol=1e-8)

    def test_bicgcr_tracks_cg_on_spd(self):
        A = convert(tridiagonal(40), "csr")
        cfg = SolverConfig(tolerance=1e-8, preconditioner=Preconditioner.NONE)
        cr = solve("bicgcr", A, np.ones(40), cfg=cfg)
        cg = solve("cg-classic", A, np.ones(40), cfg=cfg)
        assert cr.converged and cg.converged
        assert abs(cr.iterations - cg.iterations) <= 2

    def test_max_iterations(self):
        A = convert(build_test_matrix("poisson2d", 16), "csr")
        report = solve("cg", A, np.ones(A.n_rows), cfg=SolverConfig(max_iterations=3))
        assert not report.converged
        assert report.iterations == 3
        assert report.final_residual_measure == report.residual_history[-1]


class TestPcgTrace:
    def test_matches_straight_line_recurrence(self):
        dense = np.array([[4.0, 1.0, 0.0], [1.0, 3.0, 1.0], [0.0, 1.0, 2.0]])
        b = np.array([1.0, 2.0, 3.0])
        report = solve("cg", _dense_to_coo(dense), b, cfg=SolverConfig(tolerance=1e-14, record_trace=True))

        # the same recurrence written out with plain numpy
        d = np.diag(dense)
        x = np.zeros(3)
        r = b - dense @ x
        z = r / d
        rho = r @ z
        p = z.copy()
        expected = []
        for iteration in range(1, len(report.trace) + 1):
            Ap = dense @ p
            sigma = p @ Ap
            alpha = rho / sigma
            expected.append({"rho": rho, "sigma": sigma, "alpha": alpha})
            x = x + alpha * p
            r = r - alpha * Ap
            z = r / d
            rho_next = r @ z
            p = z + (rho_next / rho) * p
            rho = rho_next

        assert len(report.trace) <= 3
        for got, want in zip(report.trace, expected):
            for key in ("rho", "sigma", "alpha"):
                assert got[key] == pytest.approx(want[key], rel=1e-12)
        assert report.trace[0]["beta"] is None
        np.testing.assert_allclose(report.solution, np.linalg.solve(dense, b), rtol=1e-10)


class TestFailures:
    def test_zero_diagonal(self):
        A = _dense_to_coo([[0.0, 1.0], [1.0, 2.0]])
        with pytest.raises(ZeroDiagonal) as info:
            solve("cg", A, [1.0, 1.0])
        assert info.value.row == 0
        with pytest.raises(ZeroDiagonal):
            JacobiPreconditioner.from_matrix(A)

    def test_breakdown_keeps_partial_report(self):
        A = _dense_to_coo([[1.0, 0.0], [0.0, -1.0]])
        with pytest.raises(Breakdown) as info:
            solve("cg", A, [1.0, 1.0], cfg=SolverConfig(preconditioner=Preconditioner.NONE))
        report = info.value.report
        assert report is not None
        assert not report.converged
        assert report.iterations == len(report.residual_history)
        assert isinstance(info.value, SolverError)

    def test_non_square(self):
        with pytest.raises(DimensionMismatch):
            solve("cg", build_coo([(0, 0, 1.0)], 2, 3), np.ones(2))

    def test_rhs_length(self):
        with pytest.raises(DimensionMismatch):
            solve("gcr", tridiagonal(4), np.ones(3))
        with pytest.raises(DimensionMismatch):
            solve("gcr", tridiagonal(4), np.ones(4), x0=np.ones(5))

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            solve("gmres", tridiagonal(4), np.ones(4))

    def test_config_bounds(self):
        with pytest.raises(ValueError):
            SolverConfig(stab_l=0)
        with pytest.raises(ValueError):
            SolverConfig(tolerance=0.0)


class TestDeterminism:
    @pytest.mark.parametrize("method", ALL_METHODS)
    def test_history_independent_of_worker_count(self, method):
        A = convert(build_test_matrix("convdiff2d" if method in NONSYMMETRIC_METHODS else "poisson2d", 12), "csr")
        b = np.ones(A.n_rows)
        histories = []
        for workers in (1, 2, 4):
            cfg = SolverConfig(policy=ExecPolicy(block_size=64, workers_per_row=4, worker_count=workers))
            histories.append(solve(method, A, b, cfg=cfg).residual_history)
        for history in histories[1:]:
            np.testing.assert_array_equal(history, histories[0])

    def test_repeat_is_bit_identical(self):
        A = convert(build_test_matrix("poisson2d", 16), "csr")
        first = solve("cg", A, np.ones(A.n_rows))
        second = solve("cg", A, np.ones(A.n_rows))
        np.testing.assert_array_equal(first.residual_history, second.residual_history)
        np.testing.assert_array_equal(first.solution, second.solution)

    def test_policies_agree_on_the_solution(self):
        A = convert(build_test_matrix("poisson2d", 16), "csr")
        b = np.ones(A.n_rows)
        reference = solve("cg", A, b, cfg=SolverConfig(tolerance=1e-10)).solution
        for bs, tw in ((32, 1), (1024, 32), (128, 4)):
            cfg = SolverConfig(tolerance=1e-10, policy=ExecPolicy(block_size=bs, workers_per_row=tw))
            np.testing.assert_allclose(solve("cg", A, b, cfg=cfg).solution, reference, rtol=1e-7)
