from typing import Dict, List, Optional
from datetime import datetime
from pydantic import BaseModel, Field

SCHEMA_VERSION = 1


class MatrixStats(BaseModel):
    """Characteristics of a test matrix (dimension, fill, row-count spread)."""
    h: int = Field(ge=0, description="Dimension (rows)")
    nz: int = Field(ge=0)
    density: float = Field(ge=0.0, le=1.0, description="nz / h^2")
    density_percent: float = Field(ge=0.0, le=100.0)
    max_row: int = Field(ge=0, description="Largest nonzero count of a row")
    densest_row: int = Field(ge=-1, description="Index of the first row holding max_row nonzeros")
    bandwidth: int = Field(ge=0, description="max |col - row| over nonzeros")
    nz_per_h_mean: float = Field(ge=0.0)
    nz_per_h_stddev: float = Field(ge=0.0, description="Population stddev of per-row counts")


class SubdomainStats(BaseModel):
    subdomain: int
    dof: int
    nnz: int
    n_interface: int
    n_neighbors: int


class RunManifest(BaseModel):
    """Everything needed to replay a CLI run."""
    schema_version: int = SCHEMA_VERSION
    command: str
    argv: List[str] = Field(default_factory=list)
    matrix_path: Optional[str] = None
    format: Optional[str] = None
    policy: Optional[Dict] = None
    solver_config: Optional[Dict] = None
    seed: Optional[int] = None
    tool_version: str
    timestamp: str = Field(default_factory=lambda: datetime.now().isoformat())
