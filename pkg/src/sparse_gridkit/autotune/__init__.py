from .timing import probe_clock_resolution, default_clock_resolution, time_kernel
from .tuner import default_policy_grid, select_best, tune_spmv

__all__ = [
    "probe_clock_resolution", "default_clock_resolution", "time_kernel",
    "default_policy_grid", "select_best", "tune_spmv",
]
