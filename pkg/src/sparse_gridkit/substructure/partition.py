"""
Algebraic sub-structuring of a square sparse system.

Every equation g gets an owner set: the subdomain it is assigned to plus the
subdomains of every equation it is coupled with (in either direction). An
equation with more than one owner is an interface equation and is
duplicated in each owner. A negative assignment marks an equation as
interface explicitly; its owners are then the subdomains of its neighbors.

A coefficient a_gh is stored by the owners common to g and h. When there
are several, it is split equally among the p lowest-id common owners, p
the largest power of two not above their count, so every share is exact
and the shares sum back to a_gh.

This departs from an equal split over all common owners whenever their
count is not a power of two: three owners get a/2, a/2 and 0 instead of
a/3 each. The local matrices are then less balanced, but a/3 is not
representable and three rounded thirds need not sum back to a. Exact
reassembly wins.
"""

import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .bands import band_row_assignment
from ..errors import DimensionMismatch, DisconnectedAssignment, EmptySubdomain
from ..formats.base import INDEX_DTYPE, VALUE_DTYPE, SparseMatrix, frozen_array
from ..formats.convert import to_csr
from ..formats.coo import CooMatrix
from ..formats.csr import CsrMatrix, coo_to_csr

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class InterfaceDescriptor:
    """Equations shared with one neighbor, in ascending global order on both sides"""
    neighbor_id: int
    equation_list: np.ndarray
    global_equations: np.ndarray

    @property
    def size(self) -> int:
        return int(self.equation_list.size)


@dataclass(frozen=True)
class LocalSystem:
    K_local: CsrMatrix
    b_local: np.ndarray
    weights: np.ndarray


@dataclass(frozen=True)
class Subdomain:
    id: int
    system: LocalSystem
    interfaces: List[InterfaceDescriptor]
    local_to_global: np.ndarray
    n_interior: int

    @property
    def n_local(self) -> int:
        return int(self.local_to_global.size)

    @property
    def neighbor_ids(self) -> List[int]:
        return [d.neighbor_id for d in self.interfaces]


@dataclass
class Partition:
    n_equations: int
    n_subdomains: int
    owner_mask: np.ndarray                     # n_equations x n_subdomains
    local_to_global: List[np.ndarray] = field(default_factory=list)
    n_interior: List[int] = field(default_factory=list)
    interfaces: List[List[InterfaceDescriptor]] = field(default_factory=list)

    def owners(self, equation: int) -> Tuple[int, ...]:
        return tuple(int(i) for i in np.flatnonzero(self.owner_mask[equation]))

    @property
    def owner_counts(self) -> np.ndarray:
        return self.owner_mask.sum(axis=1)

    def interface_equations(self) -> np.ndarray:
        return np.flatnonzero(self.owner_counts > 1)

    def subdomains(self, locals_: Sequence[LocalSystem]) -> List[Subdomain]:
        return [
            Subdomain(i, locals_[i], self.interfaces[i], self.local_to_global[i], self.n_interior[i])
            for i in range(self.n_subdomains)
        ]


def _owner_mask(csr: CsrMatrix, assignment: np.ndarray, n_subdomains: int) -> np.ndarray:
    n = csr.n_rows
    rows, cols = csr.entry_rows, csr.col_idx
    g = np.concatenate((np.arange(n), rows, cols))
    owner = np.concatenate((assignment, assignment[cols], assignment[rows]))
    keep = owner >= 0
    mask = np.zeros((n, n_subdomains), dtype=bool)
    mask[g[keep], owner[keep]] = True
    return mask


def _split_shares(common: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Pick the p lowest common owners of every coefficient, p a power of two"""
    counts = common.sum(axis=1)
    p = np.ones_like(counts)
    several = counts > 1
    p[several] = 2 ** np.floor(np.log2(counts[several])).astype(counts.dtype)
    rank = np.cumsum(common, axis=1)
    return common & (rank <= p[:, None]), p


def partition_matrix(
    A: SparseMatrix,
    assignment: Optional[Sequence[int]] = None,
    n_parts: Optional[int] = None,
    b=None,
) -> Tuple[Partition, List[LocalSystem]]:
    """Split A (and b) into one LocalSystem per subdomain.

    Either an explicit per-equation assignment or n_parts (contiguous
    band-row split) must be given.
    """
    csr = to_csr(A)
    n = csr.n_rows
    if csr.n_cols != n:
        raise DimensionMismatch(f"sub-structuring needs a square matrix, got {n}x{csr.n_cols}")
    if assignment is None:
        if n_parts is None:
            raise ValueError("give either an assignment or n_parts")
        assignment = band_row_assignment(n, n_parts)
    assignment = np.asarray(assignment, dtype=INDEX_DTYPE)
    if assignment.shape != (n,):
        raise DimensionMismatch(f"assignment has {assignment.size} entries for {n} equations")
    n_subdomains = int(assignment.max()) + 1 if n else 0
    if n_parts is not None:
        n_subdomains = max(n_subdomains, n_parts)
    if n_subdomains < 1:
        raise EmptySubdomain("assignment names no subdomain")
    b = np.zeros(n, dtype=VALUE_DTYPE) if b is None else np.asarray(b, dtype=VALUE_DTYPE)
    if b.shape != (n,):
        raise DimensionMismatch(f"rhs has shape {b.shape}, system has {n} equations")

    mask = _owner_mask(csr, assignment, n_subdomains)
    counts = mask.sum(axis=1)
    orphans = np.flatnonzero(counts == 0)
    if orphans.size:
        g = int(orphans[0])
        raise DisconnectedAssignment(g, g)
    empty = np.flatnonzero(mask.sum(axis=0) == 0)
    if empty.size:
        raise EmptySubdomain(f"subdomain {int(empty[0])} holds no equation")

    rows, cols, values = csr.entry_rows, csr.col_idx, csr.values
    common = mask[rows] & mask[cols]
    disconnected = np.flatnonzero(~common.any(axis=1))
    if disconnected.size:
        e = int(disconnected[0])
        raise DisconnectedAssignment(int(rows[e]), int(cols[e]))
    chosen, p = _split_shares(common)
    shares = values / p

    partition = Partition(n, n_subdomains, mask)
    locals_: List[LocalSystem] = []
    for i in range(n_subdomains):
        members = np.flatnonzero(mask[:, i])
        shared = counts[members] > 1
        local_to_global = np.concatenate((members[~shared], members[shared]))
        global_to_local = np.full(n, -1, dtype=INDEX_DTYPE)
        global_to_local[local_to_global] = np.arange(local_to_global.size)

        take = chosen[:, i]
        K_local = coo_to_csr(CooMatrix(
            local_to_global.size,
            local_to_global.size,
            global_to_local[rows[take]],
            global_to_local[cols[take]],
            shares[take],
        ))
        weights = 1.0 / counts[local_to_global]
        locals_.append(LocalSystem(K_local, frozen_array(b[local_to_global], VALUE_DTYPE),
                                   frozen_array(weights, VALUE_DTYPE)))

        interfaces = []
        for j in range(n_subdomains):
            if j == i:
                continue
            common_eqs = np.flatnonzero(mask[:, i] & mask[:, j])
            if common_eqs.size:
                interfaces.append(InterfaceDescriptor(j, global_to_local[common_eqs], common_eqs))
        partition.local_to_global.append(frozen_array(local_to_global, INDEX_DTYPE))
        partition.n_interior.append(int((~shared).sum()))
        partition.interfaces.append(interfaces)

    logger.info("partitioned %d equations into %d subdomains, %d interface equations",
                n, n_subdomains, int((counts > 1).sum()))
    return partition, locals_


def reassemble(partition: Partition, locals_: Sequence[LocalSystem]) -> CsrMatrix:
    """Lift every local matrix to global numbering and add them up (exactly rounded sums)"""
    contributions: Dict[Tuple[int, int], List[float]] = defaultdict(list)
    for i, system in enumerate(locals_):
        coo = system.K_local.to_coo()
        l2g = partition.local_to_global[i]
        for r, c, v in zip(l2g[coo.row_idx], l2g[coo.col_idx], coo.values):
            contributions[(int(r), int(c))].append(float(v))
    n = partition.n_equations
    if not contributions:
        return coo_to_csr(CooMatrix(n, n, np.empty(0), np.empty(0), np.empty(0)))
    keys = list(contributions)
    rows = np.array([k[0] for k in keys])
    cols = np.array([k[1] for k in keys])
    values = np.array([math.fsum(contributions[k]) for k in keys])
    return coo_to_csr(CooMatrix(n, n, rows, cols, values))
