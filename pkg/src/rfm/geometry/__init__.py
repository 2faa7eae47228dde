"""Domains, partitions, partition-of-unity weights and collocation points."""

from .domain import (
    Domain,
    Subdomain,
    Partition,
    build_partition,
    partition_from_dict,
    to_local,
    from_local,
    uniform_points,
    tensor_grid,
)
from .pou import PouKind, pou_weight, pou_weight_1d, smooth_pou_derivatives
from .collocation import CollocationSet, InterfacePoints, PointRole, sample_collocation

__all__ = [
    'Domain',
    'Subdomain',
    'Partition',
    'build_partition',
    'partition_from_dict',
    'to_local',
    'from_local',
    'uniform_points',
    'tensor_grid',
    'PouKind',
    'pou_weight',
    'pou_weight_1d',
    'smooth_pou_derivatives',
    'CollocationSet',
    'InterfacePoints',
    'PointRole',
    'sample_collocation',
]
