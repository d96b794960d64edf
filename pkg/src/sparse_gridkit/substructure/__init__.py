"""
Algebraic sub-structuring: partitioning, interface exchange, parallel CG.
"""

from .bands import Band, band_row_assignment, band_row_split, band_row_spmv, band_column_split, band_column_spmv
from .partition import InterfaceDescriptor, LocalSystem, Subdomain, Partition, partition_matrix, reassemble
from .channels import ChannelGroup, Communicator, GroupCancelled
from .exchange import (
    NEIGHBOR_ORDERS,
    welsh_powell_coloring,
    order_interfaces,
    local_spmv_assemble,
    distributed_dot,
    check_interface_consistency,
)
from .solver import solve_cg_substructured
from .stats import partition_stats, read_assignment

__all__ = [
    "Band", "band_row_assignment", "band_row_split", "band_row_spmv", "band_column_split", "band_column_spmv",
    "InterfaceDescriptor", "LocalSystem", "Subdomain", "Partition", "partition_matrix", "reassemble",
    "ChannelGroup", "Communicator", "GroupCancelled",
    "NEIGHBOR_ORDERS", "welsh_powell_coloring", "order_interfaces",
    "local_spmv_assemble", "distributed_dot", "check_interface_consistency",
    "solve_cg_substructured",
    "partition_stats", "read_assignment",
]
