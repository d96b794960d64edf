from .policy import (
    BLOCK_SIZES,
    WORKERS_PER_ROW,
    GridStrategy,
    ExecPolicy,
    DeviceLimits,
    GridShape,
    default_policy,
)
from .bench import CSV_HEADER, TimingProtocol, BenchRecord, TuneResult
from .solver import Preconditioner, SolverConfig, SolveReport
from .report import SCHEMA_VERSION, MatrixStats, SubdomainStats, RunManifest
