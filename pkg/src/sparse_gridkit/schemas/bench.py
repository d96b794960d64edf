from typing import List, Optional
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .policy import ExecPolicy

CSV_HEADER = ["kernel", "matrix", "block_size", "workers_per_row", "strategy", "reps", "mean_ms", "stddev_ms"]


class TimingProtocol(BaseModel):
    """Repeat a kernel at least min_repetitions times and until the total
    measured time exceeds clock_resolution_multiplier clock ticks."""
    model_config = ConfigDict(frozen=True)

    min_repetitions: int = Field(default=10, ge=1)
    clock_resolution_multiplier: int = Field(default=100, ge=1)
    warmup_repetitions: int = Field(default=2, ge=0)
    max_repetitions: int = Field(default=1_000_000, ge=1)

    @model_validator(mode="after")
    def _check_bounds(self):
        if self.max_repetitions < self.min_repetitions:
            raise ValueError("max_repetitions must be >= min_repetitions")
        return self


class BenchRecord(BaseModel):
    kernel_name: str
    matrix_name: str = ""
    policy: ExecPolicy
    reps: int = Field(ge=1)
    total_time: float = Field(ge=0.0, description="seconds")
    mean_time: float = Field(ge=0.0, description="seconds")
    stddev_time: float = Field(ge=0.0, description="seconds")
    clock_resolution: Optional[float] = None

    @property
    def mean_ms(self) -> float:
        return self.mean_time * 1e3

    @property
    def stddev_ms(self) -> float:
        return self.stddev_time * 1e3

    def csv_row(self) -> List[str]:
        return [
            self.kernel_name,
            self.matrix_name,
            str(self.policy.block_size),
            str(self.policy.workers_per_row),
            self.policy.grid_strategy.value,
            str(self.reps),
            f"{self.mean_ms:.6f}",
            f"{self.stddev_ms:.6f}",
        ]


class TuneResult(BaseModel):
    best_policy: ExecPolicy
    table: List[BenchRecord] = Field(default_factory=list)
    default_record: BenchRecord
    speedup_vs_default: float
    max_relative_deviation: float = 0.0

    @property
    def best_record(self) -> BenchRecord:
        for record in self.table:
            if record.policy == self.best_policy:
                return record
        raise LookupError("best policy missing from table")
