from enum import Enum
from typing import Dict, List, Optional
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_serializer, model_validator

from .policy import ExecPolicy


class Preconditioner(str, Enum):
    NONE = "none"
    JACOBI = "jacobi"


class SolverConfig(BaseModel):
    """Solver knobs; defaults are the experimental protocol (tol 1e-6, 30000 iterations)."""
    model_config = ConfigDict(frozen=True)

    tolerance: float = Field(default=1e-6, gt=0.0)
    max_iterations: int = Field(default=30000, ge=1)
    preconditioner: Preconditioner = Preconditioner.JACOBI
    restart: int = Field(default=50, ge=1, description="GCR restart length m")
    stab_l: int = Field(default=2, ge=1, le=9, description="BiCGStab(l) polynomial degree")
    policy: ExecPolicy = Field(default_factory=ExecPolicy)
    record_trace: bool = False


class SolveReport(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    method: str
    converged: bool
    iterations: int = Field(ge=0)
    final_residual_measure: float
    residual_history: np.ndarray
    wall_time: float = Field(ge=0.0, description="seconds")
    solution: np.ndarray
    matvecs: int = 0
    trace: List[Dict[str, Optional[float]]] = Field(default_factory=list)
    subdomain_times: Optional[List[float]] = None

    @model_validator(mode="after")
    def _history_matches_iterations(self):
        if len(self.residual_history) != self.iterations:
            raise ValueError(
                f"residual history has {len(self.residual_history)} entries for {self.iterations} iterations"
            )
        return self

    @field_serializer("residual_history", "solution")
    def _serialize_array(self, value: np.ndarray) -> List[float]:
        return [float(v) for v in value]

    def summary(self, include_solution: bool = False) -> Dict:
        data = self.model_dump()
        if not include_solution:
            data.pop("solution")
        return data
