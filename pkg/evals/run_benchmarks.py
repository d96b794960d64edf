import os
import glob
import json
import argparse
from datetime import datetime
from typing import Dict, List, Tuple

import numpy as np

from src.sparse_gridkit.autotune import time_kernel, tune_spmv
from src.sparse_gridkit.config import BENCHMARK_RESULTS_DIR, MATRIX_DIR, configure_logging
from src.sparse_gridkit.errors import SparseGridkitError
from src.sparse_gridkit.formats import SparseMatrix, convert, to_csr, transpose
from src.sparse_gridkit.kernels import spmv
from src.sparse_gridkit.matrix_io import build_test_matrix, compute_stats, read_matrix_market
from src.sparse_gridkit.schemas import ExecPolicy, Preconditioner, SolverConfig, TimingProtocol
from src.sparse_gridkit.solvers import solve
from src.sparse_gridkit.substructure import partition_matrix, partition_stats, solve_cg_substructured

SECTIONS = ("stats", "formats", "tuning", "solvers", "stab_l", "partition", "substructured")
SOLVER_METHODS = ("cg", "gcr", "bicgcr", "tfqmr", "bicgstab", "bicgstabl")
NONSYMMETRIC_METHODS = ("gcr", "bicgcr", "tfqmr", "bicgstab", "bicgstabl")
SPMV_FORMATS = ("coo", "csr", "ell", "hyb")
STAB_L_DEGREES = (1, 2, 3, 4, 5, 6, 7, 8)
PART_COUNTS = (1, 2, 4, 8)

# generated stand-ins: (name, kind, n, symmetric)
DESK_MATRICES = (
    ("poisson2d_64", "poisson2d", 64, True),
    ("laplace1d_2000", "laplace1d", 2000, True),
    ("convdiff2d_64", "convdiff2d", 64, False),
)


class BenchmarkRunner:
    def __init__(self, output_dir: str = BENCHMARK_RESULTS_DIR, quick: bool = False):
        self.output_dir = output_dir
        self.quick = quick
        os.makedirs(output_dir, exist_ok=True)
        self.current_run_file = None
        self.protocol = TimingProtocol(min_repetitions=3 if quick else 10)

    def load_matrices(self) -> List[Tuple[str, SparseMatrix, bool]]:
        """Generated desk-scale matrices, plus any collection matrices already downloaded"""
        matrices = []
        for name, kind, n, symmetric in DESK_MATRICES:
            size = max(8, n // 4) if self.quick else n
            matrices.append((name, build_test_matrix(kind, size), symmetric))
        for path in sorted(glob.glob(os.path.join(MATRIX_DIR, "*.mtx"))):
            name = os.path.splitext(os.path.basename(path))[0]
            try:
                matrix = read_matrix_market(path)
            except (OSError, SparseGridkitError) as e:
                print(f"    Skipping {path}: {e}")
                continue
            csr = to_csr(matrix)
            symmetric = transpose(csr) == csr
            matrices.append((name, matrix, symmetric))
        return matrices

    def get_latest_run_file(self) -> str:
        runs = sorted(glob.glob(os.path.join(self.output_dir, "bench_*.txt")))
        return runs[-1] if runs else None

    def load_existing_run(self, filepath: str) -> Dict[str, List[Dict]]:
        """Parse the RECORD lines of a previous run, grouped by section"""
        results: Dict[str, List[Dict]] = {section: [] for section in SECTIONS}
        with open(filepath, "r") as f:
            for line in f:
                if line.startswith("RECORD:"):
                    try:
                        record = json.loads(line[len("RECORD:"):])
                    except json.JSONDecodeError:
                        continue
                    results.setdefault(record.get("section", ""), []).append(record)
        return results

    def save_record(self, record: Dict):
        with open(self.current_run_file, "a") as f:
            f.write(f"RECORD:{json.dumps(record)}\n")

    def create_new_run(self) -> Dict[str, List[Dict]]:
        timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
        self.current_run_file = os.path.join(self.output_dir, f"bench_{timestamp}.txt")
        with open(self.current_run_file, "w") as f:
            f.write(f"BENCHMARK RUN: {timestamp}\n")
            f.write(f"STARTED: {datetime.now().isoformat()}\n")
            f.write("=" * 80 + "\n\n")
        print(f"\nCreated new run: {self.current_run_file}\n")
        return {section: [] for section in SECTIONS}

    def resume_existing_run(self) -> Dict[str, List[Dict]]:
        latest = self.get_latest_run_file()
        if latest is None:
            print("\nNo existing runs found.")
            return self.create_new_run()
        self.current_run_file = latest
        existing = self.load_existing_run(latest)
        print(f"\nResuming run: {self.current_run_file}")
        print(f"    Already completed: {sum(len(v) for v in existing.values())} records\n")
        return existing

    @staticmethod
    def completed_ids(results: Dict[str, List[Dict]], section: str) -> set:
        return {r["case_id"] for r in results.get(section, []) if "case_id" in r}

    def _run_case(self, section: str, case_id: str, done: set, work) -> None:
        if case_id in done:
            print(f"    Skipping (already completed): {case_id}")
            return
        print(f"    {case_id}")
        try:
            record = work()
        except SparseGridkitError as e:
            print(f"    Error: {e}")
            record = {"error": str(e)}
        record.update({"section": section, "case_id": case_id})
        self.save_record(record)

    def run(self, resume: bool = False, sections=SECTIONS):
        existing = self.resume_existing_run() if resume else self.create_new_run()
        matrices = self.load_matrices()
        for section in sections:
            print("\n" + "=" * 80)
            print(f"RUNNING {section.upper()}")
            print("=" * 80)
            getattr(self, f"bench_{section}")(matrices, self.completed_ids(existing, section))
        self.print_summary()

    # ------------------------------------------------------------ sections

    def bench_stats(self, matrices, done):
        for name, m, _ in matrices:
            self._run_case("stats", name, done, lambda m=m: compute_stats(m).model_dump())

    def bench_formats(self, matrices, done):
        """SpMV time per storage format at the default policy"""
        policy = ExecPolicy()
        for name, m, _ in matrices:
            x = np.ones(m.n_cols)
            for fmt in SPMV_FORMATS:
                def work(m=m, fmt=fmt):
                    converted = convert(m, fmt)
                    record = time_kernel(lambda: spmv(converted, x, policy), self.protocol,
                                         kernel_name=f"spmv_{fmt}", matrix_name=name, policy=policy)
                    return {"matrix": name, "format": fmt, "reps": record.reps,
                            "mean_ms": record.mean_ms, "stddev_ms": record.stddev_ms}
                self._run_case("formats", f"{name}/{fmt}", done, work)

    def bench_tuning(self, matrices, done):
        """Best policy per matrix against the default <256,8>"""
        for name, m, _ in matrices:
            def work(m=m, name=name):
                result = tune_spmv(convert(m, "csr"), protocol=self.protocol, matrix_name=name)
                return {"matrix": name, "best_policy": result.best_policy.label(),
                        "best_ms": result.best_record.mean_ms,
                        "default_ms": result.default_record.mean_ms,
                        "speedup": result.speedup_vs_default,
                        "max_relative_deviation": result.max_relative_deviation}
            self._run_case("tuning", name, done, work)

    def _solve_record(self, name: str, method: str, m, cfg: SolverConfig) -> Dict:
        report = solve(method, m, np.ones(m.n_rows), None, cfg)
        return {"matrix": name, "method": report.method, "converged": report.converged,
                "iterations": report.iterations, "matvecs": report.matvecs,
                "final_measure": report.final_residual_measure, "wall_time": report.wall_time}

    def bench_solvers(self, matrices, done):
        """Iterations and time of every method, with and without Jacobi"""
        for name, m, symmetric in matrices:
            csr = convert(m, "csr")
            methods = SOLVER_METHODS if symmetric else NONSYMMETRIC_METHODS
            for method in methods:
                for precond in (Preconditioner.JACOBI, Preconditioner.NONE):
                    cfg = SolverConfig(preconditioner=precond)
                    self._run_case("solvers", f"{name}/{method}/{precond.value}", done,
                                   lambda csr=csr, method=method, cfg=cfg: self._solve_record(name, method, csr, cfg))

    def bench_stab_l(self, matrices, done):
        """BiCGStab(l) iteration counts as the degree grows"""
        for name, m, symmetric in matrices:
            if symmetric:
                continue
            csr = convert(m, "csr")
            for l in STAB_L_DEGREES:
                cfg = SolverConfig(stab_l=l)
                self._run_case("stab_l", f"{name}/l={l}", done,
                               lambda csr=csr, cfg=cfg: self._solve_record(name, "bicgstabl", csr, cfg))

    def bench_partition(self, matrices, done):
        for name, m, symmetric in matrices:
            if not symmetric:
                continue
            for parts in PART_COUNTS[1:]:
                def work(m=m, parts=parts):
                    partition, locals_ = partition_matrix(m, n_parts=parts)
                    return {"matrix": name, "parts": parts,
                            "subdomains": [row.model_dump() for row in partition_stats(partition, locals_)]}
                self._run_case("partition", f"{name}/p={parts}", done, work)

    def bench_substructured(self, matrices, done):
        """Sub-structured CG against the sequential iteration count"""
        for name, m, symmetric in matrices:
            if not symmetric:
                continue
            for parts in PART_COUNTS:
                def work(m=m, parts=parts):
                    report = solve_cg_substructured(m, np.ones(m.n_rows), n_parts=parts)
                    return {"matrix": name, "parts": parts, "converged": report.converged,
                            "iterations": report.iterations, "wall_time": report.wall_time,
                            "subdomain_times": report.subdomain_times}
                self._run_case("substructured", f"{name}/p={parts}", done, work)

    def print_summary(self):
        results = self.load_existing_run(self.current_run_file)
        print("\n" + "=" * 80)
        print("BENCHMARK SUMMARY")
        print("=" * 80)

        solver_rows = [r for r in results["solvers"] if "error" not in r]
        if solver_rows:
            print(f"\n  SOLVERS (n={len(solver_rows)})")
            for r in solver_rows:
                status = "ok" if r["converged"] else "NOT CONVERGED"
                print(f"    {r['case_id']:<40} {r['iterations']:>7} it  {r['wall_time']:>8.3f}s  {status}")

        tuning_rows = [r for r in results["tuning"] if "error" not in r]
        if tuning_rows:
            print(f"\n  TUNING (n={len(tuning_rows)})")
            for r in tuning_rows:
                print(f"    {r['matrix']:<24} best {r['best_policy']:<20} speed-up {r['speedup']:.3f}")

        total = sum(len(v) for v in results.values())
        errors = sum(len([r for r in v if "error" in r]) for v in results.values())
        print("\n   OVERALL SUMMARY")
        print(f"        Records:            {total}")
        print(f"        Successful:         {total - errors}")
        print(f"        Errors:             {errors}")
        print(f"\nResults saved to: {self.current_run_file}")
        print("=" * 80 + "\n")


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description="Run the sparse-gridkit benchmark tables")
    parser.add_argument("--resume", action="store_true", help="Continue the latest run instead of starting a new one")
    parser.add_argument("--quick", action="store_true", help="Smaller matrices and fewer repetitions")
    parser.add_argument("--section", action="append", choices=SECTIONS, help="Run only these sections")
    parser.add_argument("--log-level", default=None)
    args = parser.parse_args()

    configure_logging(args.log_level)
    runner = BenchmarkRunner(quick=args.quick)
    runner.run(resume=args.resume, sections=tuple(args.section or SECTIONS))
