"""
Matrix ingestion, statistics, generated test matrices and report files.
"""

from .market import read_matrix_market, write_matrix_market
from .stats import compute_stats
from .generators import KINDS, laplace1d, poisson2d, convdiff2d, build_test_matrix, generate_test_matrix
from .archive import save_format, load_format
from .reports import TOOL_VERSION, write_bench_csv, json_report, write_json_report, build_manifest

__all__ = [
    "read_matrix_market", "write_matrix_market",
    "compute_stats",
    "KINDS", "laplace1d", "poisson2d", "convdiff2d", "build_test_matrix", "generate_test_matrix",
    "save_format", "load_format",
    "TOOL_VERSION", "write_bench_csv", "json_report", "write_json_report", "build_manifest",
]
