"""
Interface exchange and distributed scalar product.

Assembly runs in two steps. Every subdomain first computes its local product
and posts temp_s = y(list_s) to each neighbor s, then receives the
neighbors' buffers and adds them in. Contributions to an equation are added
in ascending subdomain id on every owner, so shared values stay bitwise
identical across subdomains.
"""

import logging
from typing import Dict, Iterable, List, Mapping, Optional

import numpy as np

from .channels import TAG_CHECK, TAG_INTERFACE, Communicator
from .partition import InterfaceDescriptor, Subdomain
from ..errors import InterfaceInconsistency
from ..formats.base import VALUE_DTYPE
from ..kernels.spmv import spmv
from ..kernels.vector import dot
from ..schemas.policy import ExecPolicy

logger = logging.getLogger(__name__)

NEIGHBOR_ORDERS = ("ascending", "welsh_powell")


def welsh_powell_coloring(adjacency: Mapping[int, Iterable[int]]) -> Dict[int, int]:
    """Greedy coloring visiting vertices by decreasing degree (ties by id)"""
    neighbors = {v: set(adj) for v, adj in adjacency.items()}
    for v, adj in list(neighbors.items()):
        for u in adj:
            neighbors.setdefault(u, set()).add(v)
    order = sorted(neighbors, key=lambda v: (-len(neighbors[v]), v))
    colors: Dict[int, int] = {}
    for v in order:
        taken = {colors[u] for u in neighbors[v] if u in colors}
        color = 0
        while color in taken:
            color += 1
        colors[v] = color
    return colors


def order_interfaces(
    interfaces: List[InterfaceDescriptor],
    neighbor_order: str = "ascending",
    colors: Optional[Mapping[int, int]] = None,
) -> List[InterfaceDescriptor]:
    """Message schedule: ascending neighbor id, or by neighbor color first"""
    if neighbor_order == "ascending":
        return sorted(interfaces, key=lambda d: d.neighbor_id)
    if neighbor_order == "welsh_powell":
        if colors is None:
            raise ValueError("welsh_powell ordering needs the subdomain coloring")
        return sorted(interfaces, key=lambda d: (colors[d.neighbor_id], d.neighbor_id))
    raise ValueError(f"unknown neighbor order '{neighbor_order}', expected one of {NEIGHBOR_ORDERS}")


def local_spmv_assemble(
    subdomain: Subdomain,
    x_local: np.ndarray,
    comm: Communicator,
    policy: Optional[ExecPolicy] = None,
    schedule: Optional[List[InterfaceDescriptor]] = None,
) -> np.ndarray:
    """y_local = restriction of A x, from the local product plus neighbor buffers"""
    y_own = spmv(subdomain.system.K_local, x_local, policy)
    if not subdomain.interfaces:
        return y_own
    schedule = schedule if schedule is not None else order_interfaces(subdomain.interfaces)

    # step 1: every send goes out before any receive
    for desc in schedule:
        comm.send(desc.neighbor_id, TAG_INTERFACE, y_own[desc.equation_list])
    received = {
        desc.neighbor_id: comm.recv(desc.neighbor_id, TAG_INTERFACE, expected_length=desc.size)
        for desc in schedule
    }

    # step 2: y(list_s(j)) += temp_s(j), sources in ascending id
    lists = {desc.neighbor_id: desc.equation_list for desc in schedule}
    y = np.zeros_like(y_own)
    for source in sorted(set(received) | {subdomain.id}):
        if source == subdomain.id:
            y += y_own
        else:
            y[lists[source]] += received[source]
    return y


def distributed_dot(
    x_local: np.ndarray,
    y_local: np.ndarray,
    weights: np.ndarray,
    comm: Communicator,
    policy: Optional[ExecPolicy] = None,
) -> float:
    """Weighted local dot, all-reduced; identical on every subdomain"""
    weighted = np.asarray(x_local, dtype=VALUE_DTYPE) * weights
    return comm.allreduce_sum(dot(weighted, y_local, policy))


def check_interface_consistency(
    subdomain: Subdomain,
    values: np.ndarray,
    comm: Communicator,
    label: str = "vector",
) -> None:
    """Compare shared entries with every neighbor; raise on any difference"""
    schedule = order_interfaces(subdomain.interfaces)
    for desc in schedule:
        comm.send(desc.neighbor_id, TAG_CHECK, values[desc.equation_list])
    for desc in schedule:
        theirs = comm.recv(desc.neighbor_id, TAG_CHECK, expected_length=desc.size)
        ours = values[desc.equation_list]
        if not np.array_equal(ours, theirs):
            bad = int(np.flatnonzero(ours != theirs)[0])
            raise InterfaceInconsistency(
                f"{label}: equation {int(desc.global_equations[bad])} differs between subdomains "
                f"{subdomain.id} and {desc.neighbor_id} ({ours[bad]!r} vs {theirs[bad]!r})"
            )
