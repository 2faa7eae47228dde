"""
Regeneration of features and interior collocation points from monitor samples.

A regenerated feature's hyperplane passes through its sample point, its
normal is a fresh random direction, and its shape parameter is the
subdomain's base gamma amplified by the relative gradient magnitude at the
sample.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..exceptions import FeatureError
from ..features import ActivationKind, FeatureSet, SubdomainFeatures
from ..geometry import CollocationSet, Partition, to_local

logger = logging.getLogger(__name__)


@dataclass
class RegenerationReport:
    """Subdomains that kept their previous features or interior points."""
    kept_features: List[int] = field(default_factory=list)
    kept_interior: List[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"kept_features": list(self.kept_features), "kept_interior": list(self.kept_interior)}


def group_by_subdomain(partition: Partition, points: np.ndarray) -> List[np.ndarray]:
    """Indices of ``points`` owned by each subdomain (lower index on faces)."""
    owners = partition.locate(points)
    return [np.flatnonzero(owners == n) for n in range(len(partition))]


def regenerate_block(sub_index: int, local_samples: np.ndarray, grads: np.ndarray,
                     gamma_base: float, c2: float, rng: np.random.Generator) -> SubdomainFeatures:
    """
    Features through the given local sample points.

    gamma_j = gamma_base * (|grad_j| + c2) / min_i (|grad_i| + c2)
    """
    local_samples = np.atleast_2d(local_samples)
    count, dim = local_samples.shape
    raw = rng.standard_normal((count, dim))
    normals = raw / np.linalg.norm(raw, axis=1)[:, None]
    offsets = -np.einsum("ij,ij->i", normals, local_samples)
    amplified = np.asarray(grads, dtype=float) + c2
    gammas = gamma_base * amplified / np.min(amplified)
    return SubdomainFeatures(sub_index, normals, offsets, gammas, local_samples)


def regenerate_features(partition: Partition, samples_by_subdomain: Sequence[np.ndarray],
                        grads_by_subdomain: Sequence[np.ndarray], gamma_base: Sequence[float],
                        c2: float, rng: np.random.Generator,
                        previous: Optional[FeatureSet] = None,
                        report: Optional[RegenerationReport] = None) -> FeatureSet:
    """
    New feature set from monitor samples grouped by owning subdomain.

    A subdomain that received no samples keeps its block from ``previous``.
    Subdomains are processed in index order from one random stream.

    Raises:
        FeatureError: if a subdomain has no samples and no previous features
    """
    if not c2 > 0:
        raise FeatureError("Shape smoothing constant must be positive", {"c2": c2})
    blocks = []
    for n, sub in enumerate(partition):
        samples = np.atleast_2d(samples_by_subdomain[n]).reshape(-1, partition.domain.dim)
        if len(samples) == 0:
            if previous is None:
                raise FeatureError("Subdomain received no feature samples", {"subdomain": n})
            logger.warning("Subdomain %d received no feature samples; keeping %d previous features",
                           n, len(previous[n]))
            if report is not None:
                report.kept_features.append(n)
            blocks.append(previous[n])
            continue
        blocks.append(regenerate_block(n, to_local(sub, samples), grads_by_subdomain[n],
                                       float(gamma_base[n]), c2, rng))
    activation = previous.activation if previous is not None else ActivationKind.TANH3
    return FeatureSet(tuple(blocks), activation)


def regenerate_collocation(prev: CollocationSet, interior_samples_by_subdomain: Sequence[np.ndarray],
                           min_interior: int = 0,
                           report: Optional[RegenerationReport] = None) -> CollocationSet:
    """
    Previous boundary and interface points plus the sampled interior points.

    A subdomain given fewer than ``min_interior`` samples keeps its previous
    interior points.
    """
    interior: List[np.ndarray] = []
    for n, samples in enumerate(interior_samples_by_subdomain):
        samples = np.atleast_2d(samples).reshape(-1, 2)
        if len(samples) < min_interior:
            logger.warning("Subdomain %d received %d interior samples; keeping %d previous points",
                           n, len(samples), len(prev.interior[n]))
            if report is not None:
                report.kept_interior.append(n)
            interior.append(prev.interior[n])
        else:
            interior.append(samples)
    return prev.with_interior(interior)


def split_samples(partition: Partition, points: np.ndarray,
                  values: Optional[np.ndarray] = None) -> Tuple[List[np.ndarray], List[np.ndarray]]:
    """Points (and matching values) grouped by owning subdomain."""
    groups = group_by_subdomain(partition, points)
    grouped_points = [points[idx] for idx in groups]
    grouped_values = [values[idx] for idx in groups] if values is not None else []
    return grouped_points, grouped_values
