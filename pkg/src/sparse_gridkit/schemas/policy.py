from enum import Enum
from typing import Optional
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..config import default_worker_count

BLOCK_SIZES = (32, 64, 128, 256, 512, 1024)
WORKERS_PER_ROW = (1, 2, 4, 8, 16, 32)


class GridStrategy(str, Enum):
    """How required blocks are laid out once the first grid dimension is full."""
    FLAT_X = "flat"
    SQUARE = "square"


class ExecPolicy(BaseModel):
    """Gridification knobs of a kernel, realized as CPU task decomposition."""
    model_config = ConfigDict(frozen=True)

    block_size: int = Field(default=256, description="Threads per block: reduction chunk and row-batch size")
    workers_per_row: int = Field(default=8, description="Lanes cooperating on one CSR row")
    grid_strategy: GridStrategy = Field(default=GridStrategy.FLAT_X)
    worker_count: int = Field(default_factory=default_worker_count, ge=1)

    @field_validator("block_size")
    @classmethod
    def _check_block_size(cls, value: int) -> int:
        if value not in BLOCK_SIZES:
            raise ValueError(f"block_size must be one of {BLOCK_SIZES}, got {value}")
        return value

    @field_validator("workers_per_row")
    @classmethod
    def _check_workers_per_row(cls, value: int) -> int:
        if value not in WORKERS_PER_ROW:
            raise ValueError(f"workers_per_row must be one of {WORKERS_PER_ROW}, got {value}")
        return value

    @property
    def rows_per_block(self) -> int:
        return max(1, self.block_size // self.workers_per_row)

    def label(self) -> str:
        return f"<{self.block_size},{self.workers_per_row}>/{self.grid_strategy.value}"

    def sort_key(self) -> tuple:
        """Tie-break order: smaller block, fewer lanes, FlatX first"""
        return (self.block_size, self.workers_per_row, 0 if self.grid_strategy is GridStrategy.FLAT_X else 1)


def default_policy(worker_count: Optional[int] = None) -> ExecPolicy:
    if worker_count is None:
        return ExecPolicy()
    return ExecPolicy(worker_count=worker_count)


class DeviceLimits(BaseModel):
    model_config = ConfigDict(frozen=True)

    max_grid_x: int = Field(default=65535, ge=1)
    max_threads_per_block: int = Field(default=1024, ge=1)


class GridShape(BaseModel):
    model_config = ConfigDict(frozen=True)

    x: int = Field(ge=1)
    y: int = Field(ge=1)
    z: int = 1

    @model_validator(mode="after")
    def _flat_z(self):
        if self.z != 1:
            raise ValueError("grids are at most two-dimensional (z == 1)")
        return self

    @property
    def capacity(self) -> int:
        return self.x * self.y
