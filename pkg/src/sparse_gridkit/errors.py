from typing import Optional, TYPE_CHECKING

if TYPE_CHECKING:
    from .schemas.solver import SolveReport


class SparseGridkitError(Exception):
    """Base class for every error raised by the toolkit."""


class IndexOutOfRange(SparseGridkitError, IndexError):
    pass


class DimensionMismatch(SparseGridkitError, ValueError):
    pass


class EllBlowup(SparseGridkitError):
    """ELL storage would exceed the configured slot cap."""

    def __init__(self, n_rows: int, width: int, max_slots: int):
        self.n_rows = n_rows
        self.width = width
        self.max_slots = max_slots
        super().__init__(
            f"ELL needs {n_rows} x {width} = {n_rows * width} slots, cap is {max_slots}"
        )


class ZeroDiagonal(SparseGridkitError, ValueError):
    def __init__(self, row: int):
        self.row = row
        super().__init__(f"Jacobi preconditioner needs a nonzero diagonal, a[{row},{row}] = 0")


class ClockUnavailable(SparseGridkitError):
    pass


class SolverError(SparseGridkitError):
    """Numerical failure during a Krylov solve; keeps the partial report."""

    def __init__(self, message: str, report: Optional["SolveReport"] = None):
        super().__init__(message)
        self.report = report


class Breakdown(SolverError):
    pass


class NonFinite(SolverError):
    pass


class DisconnectedAssignment(SparseGridkitError):
    def __init__(self, row: int, col: int):
        self.row = row
        self.col = col
        super().__init__(f"coefficient ({row}, {col}) couples equations with no common subdomain")


class EmptySubdomain(SparseGridkitError, ValueError):
    pass


class ProtocolDeadlock(SparseGridkitError):
    pass


class BufferLengthMismatch(SparseGridkitError):
    pass


class InterfaceInconsistency(SparseGridkitError):
    pass


class ParseError(SparseGridkitError):
    def __init__(self, message: str, line: Optional[int] = None, path: Optional[str] = None):
        self.line = line
        self.path = path
        where = f"{path}:" if path else ""
        where += f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{message}")


class UnsupportedField(SparseGridkitError):
    pass


class UsageError(SparseGridkitError):
    pass
