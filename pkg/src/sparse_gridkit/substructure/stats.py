from typing import List, Sequence

import numpy as np

from .partition import LocalSystem, Partition
from ..errors import DimensionMismatch, ParseError
from ..formats.base import INDEX_DTYPE
from ..schemas.report import SubdomainStats


def partition_stats(partition: Partition, locals_: Sequence[LocalSystem]) -> List[SubdomainStats]:
    """Degrees of freedom and nonzeros held by every subdomain"""
    table = []
    for i, system in enumerate(locals_):
        n_local = int(partition.local_to_global[i].size)
        table.append(SubdomainStats(
            subdomain=i,
            dof=n_local,
            nnz=system.K_local.nnz,
            n_interface=n_local - partition.n_interior[i],
            n_neighbors=len(partition.interfaces[i]),
        ))
    return table


def read_assignment(path: str, n: int) -> np.ndarray:
    """One subdomain id per line (0-based; negative marks an interface equation)"""
    ids = []
    with open(path, "r") as f:
        for line_no, line in enumerate(f, 1):
            text = line.strip()
            if not text or text.startswith(("#", "%")):
                continue
            try:
                ids.append(int(text.split()[0]))
            except ValueError:
                raise ParseError(f"expected an integer subdomain id, got {text!r}", line=line_no, path=path)
    if len(ids) != n:
        raise DimensionMismatch(f"{path}: assignment has {len(ids)} entries, matrix has {n} equations")
    return np.array(ids, dtype=INDEX_DTYPE)
