"""
Rescaled least-squares system for a linear problem on a partition.

Rows, in order:
  * PDE rows at every interior and domain-boundary point, per component;
  * Dirichlet rows at domain-boundary points (subject to the problem's mask);
  * continuity rows at interface points: the value jump and every
    first-derivative jump between the two neighbouring local expansions.

Every row is scaled so its largest absolute entry equals ``c``; rows whose
entries are all zero are dropped and counted.
"""

import logging
from collections import Counter
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Dict, List, Optional, Tuple

import numpy as np

from .. import constants
from ..exceptions import AssemblyError, NonFiniteSystemError, SystemSizingError
from ..features import FeatureSet
from ..geometry import CollocationSet, Partition
from .operators import OperatorSpec, ProblemDefinition, apply_operator, as_columns, basis_derivatives
from .solution import ColumnMap

logger = logging.getLogger(__name__)


class RowTag(IntEnum):
    PDE = 0
    BOUNDARY = 1
    CONTINUITY_VALUE = 2
    CONTINUITY_GRADIENT = 3


@dataclass
class LinearSystem:
    matrix: np.ndarray
    rhs: np.ndarray
    row_tags: np.ndarray
    columns: ColumnMap
    scales: np.ndarray
    dropped_rows: int = 0
    dropped_by_tag: Dict[str, int] = field(default_factory=dict)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.matrix.shape

    def tag_counts(self) -> Dict[str, int]:
        counts = Counter(int(t) for t in self.row_tags)
        return {tag.name.lower(): counts.get(int(tag), 0) for tag in RowTag}

    def diagnostics(self) -> Dict[str, object]:
        return {
            "rows": int(self.shape[0]),
            "cols": int(self.shape[1]),
            "rows_by_tag": self.tag_counts(),
            "dropped_rows": self.dropped_rows,
            "dropped_by_tag": dict(self.dropped_by_tag),
        }


@dataclass
class _RowBlock:
    tag: RowTag
    rhs: np.ndarray
    pieces: List[Tuple[slice, np.ndarray]]

    @property
    def count(self) -> int:
        return len(self.rhs)


def compute_rescaling(rows: np.ndarray, c: float = constants.RESCALE_CONSTANT) -> Tuple[np.ndarray, np.ndarray]:
    """
    Per-row scale ``c / max_j |row_j|``.

    Returns:
        (scales, degenerate) where degenerate rows have a zero maximum and scale 0.
    """
    if not c > 0:
        raise AssemblyError("Rescaling constant must be positive", {"c": c})
    rows = np.atleast_2d(rows)
    peak = np.max(np.abs(rows), axis=1) if rows.shape[1] else np.zeros(len(rows))
    degenerate = peak == 0.0
    scales = np.zeros(len(rows))
    scales[~degenerate] = c / peak[~degenerate]
    return scales, degenerate


def _pde_blocks(operator: OperatorSpec, problem: ProblemDefinition, partition: Partition,
                features: FeatureSet, colloc: CollocationSet, columns: ColumnMap) -> List[_RowBlock]:
    blocks = []
    for n, sub in enumerate(partition):
        points = colloc.pde_points(n)
        if len(points) == 0:
            continue
        source = as_columns(problem.source(points), len(points), operator.output_dim)
        for comp in range(operator.output_dim):
            rows = apply_operator(operator, features[n], sub, points, comp)
            blocks.append(_RowBlock(RowTag.PDE, source[:, comp], [(columns.block(n, comp), rows)]))
    return blocks


def _boundary_blocks(problem: ProblemDefinition, partition: Partition, features: FeatureSet,
                     colloc: CollocationSet, columns: ColumnMap) -> List[_RowBlock]:
    blocks = []
    for n, sub in enumerate(partition):
        points = colloc.boundary[n]
        if problem.dirichlet_mask is not None and len(points):
            points = points[np.asarray(problem.dirichlet_mask(points), dtype=bool)]
        if len(points) == 0:
            continue
        data = as_columns(problem.boundary(points), len(points), problem.output_dim)
        values = basis_derivatives(features[n], sub, points, order=0).value
        for comp in range(problem.output_dim):
            blocks.append(_RowBlock(RowTag.BOUNDARY, data[:, comp], [(columns.block(n, comp), values)]))
    return blocks


def _continuity_blocks(partition: Partition, features: FeatureSet, colloc: CollocationSet,
                       columns: ColumnMap, output_dim: int) -> List[_RowBlock]:
    blocks = []
    interface = colloc.interface
    if len(interface) == 0:
        return blocks
    pairs = [tuple(p) for p in np.unique(interface.pairs, axis=0)]
    for low, high in pairs:
        mask = (interface.pairs[:, 0] == low) & (interface.pairs[:, 1] == high)
        points = interface.points[mask]
        left = basis_derivatives(features[low], partition[low], points, order=1)
        right = basis_derivatives(features[high], partition[high], points, order=1)
        zeros = np.zeros(len(points))
        for comp in range(output_dim):
            lcols, rcols = columns.block(low, comp), columns.block(high, comp)
            blocks.append(_RowBlock(RowTag.CONTINUITY_VALUE, zeros,
                                    [(lcols, left.value), (rcols, -right.value)]))
            for axis in range(points.shape[1]):
                blocks.append(_RowBlock(RowTag.CONTINUITY_GRADIENT, zeros,
                                        [(lcols, left.gradient[axis]), (rcols, -right.gradient[axis])]))
    return blocks


def assemble_system(problem: ProblemDefinition, partition: Partition, features: FeatureSet,
                    colloc: CollocationSet, c: float = constants.RESCALE_CONSTANT,
                    operator: Optional[OperatorSpec] = None) -> LinearSystem:
    """
    Build the rescaled dense system for ``problem``.

    Args:
        problem: operator, source and boundary data
        partition: subdomains the features live on
        features: calibrated features per subdomain
        colloc: collocation points
        c: rescaling constant
        operator: overrides ``problem.operator`` (frozen Picard operators)

    Raises:
        NonFiniteSystemError: if any entry or right-hand side is not finite
        SystemSizingError: if fewer rows than columns remain
    """
    operator = operator or problem.operator
    if len(features) != len(partition) or colloc.n_subdomains != len(partition):
        raise AssemblyError("Features and collocation must cover every subdomain",
                            {"subdomains": len(partition), "feature_blocks": len(features),
                             "collocation_blocks": colloc.n_subdomains})
    columns = ColumnMap.for_features(features, operator.output_dim)
    blocks = (_pde_blocks(operator, problem, partition, features, colloc, columns)
              + _boundary_blocks(problem, partition, features, colloc, columns)
              + _continuity_blocks(partition, features, colloc, columns, operator.output_dim))

    n_rows = sum(b.count for b in blocks)
    matrix = np.zeros((n_rows, columns.total))
    rhs = np.empty(n_rows)
    tags = np.empty(n_rows, dtype=int)
    row = 0
    for block in blocks:
        rows = slice(row, row + block.count)
        for cols, values in block.pieces:
            matrix[rows, cols] = values
        rhs[rows] = block.rhs
        tags[rows] = int(block.tag)
        row += block.count

    bad = ~np.isfinite(matrix).all(axis=1) | ~np.isfinite(rhs)
    if bad.any():
        first = int(np.flatnonzero(bad)[0])
        raise NonFiniteSystemError("Assembled system has non-finite entries",
                                   {"row": first, "tag": RowTag(tags[first]).name.lower(),
                                    "bad_rows": int(bad.sum())})

    scales, degenerate = compute_rescaling(matrix, c)
    keep = ~degenerate
    dropped_by_tag = {RowTag(t).name.lower(): int(v) for t, v in Counter(tags[degenerate]).items()}
    if degenerate.any():
        logger.debug("Dropping %d degenerate rows: %s", int(degenerate.sum()), dropped_by_tag)
    matrix = matrix[keep] * scales[keep, None]
    rhs = rhs[keep] * scales[keep]

    if matrix.shape[0] < matrix.shape[1]:
        raise SystemSizingError("Least-squares system has fewer rows than columns",
                                {"rows": int(matrix.shape[0]), "cols": int(matrix.shape[1]),
                                 "features": list(features.counts)})
    system = LinearSystem(matrix, rhs, tags[keep], columns, scales[keep],
                          int(degenerate.sum()), dropped_by_tag)
    logger.debug("Assembled %d x %d system %s", system.shape[0], system.shape[1], system.tag_counts())
    return system
