"""
Shape-parameter calibration by grid search.

For each candidate gamma, all features of a subdomain share that gamma and
are fitted by least squares to ``L`` Gaussian random field realizations; the
candidate with the smallest mean fitting loss wins. Fields are sampled at
physical points; the features see the same points in local coordinates.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from .. import constants
from ..exceptions import FeatureError
from ..geometry import CollocationSet, Partition, Subdomain, tensor_grid, to_local
from ..parallel import ordered_map
from ..random_streams import GRF, RandomStreams
from .activation import activation_stack
from .feature_space import FeatureLike, FeatureSet, as_block
from .grf import GrfConfig, simulate_grf

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CalibrationSettings:
    grf: GrfConfig = field(default_factory=GrfConfig)
    gamma_grid: Tuple[float, ...] = constants.GAMMA_GRID
    max_points: int = constants.GRF_MAX_POINTS
    shared: bool = True
    workers: int = 1
    rank_tol: float = constants.RANK_TOL

    def __post_init__(self):
        grid = tuple(float(g) for g in self.gamma_grid)
        if not grid:
            raise FeatureError("Gamma grid must not be empty")
        if any(g <= 0 for g in grid):
            raise FeatureError("Gamma grid values must be positive", {"gamma_grid": grid})
        object.__setattr__(self, "gamma_grid", grid)

    def to_dict(self) -> dict:
        return {
            "grf": self.grf.to_dict(),
            "gamma_grid": list(self.gamma_grid),
            "max_points": self.max_points,
            "shared": self.shared,
            "workers": self.workers,
        }


@dataclass(frozen=True)
class CalibrationResult:
    gamma: float
    gamma_grid: Tuple[float, ...]
    losses: np.ndarray

    def to_dict(self) -> dict:
        return {"gamma": self.gamma, "gamma_grid": list(self.gamma_grid),
                "losses": [float(v) for v in self.losses]}


def fit_points(sub: Subdomain, points: np.ndarray, max_points: int) -> np.ndarray:
    """
    Physical points the random fields are sampled and fitted on.

    Collocation points are used as given when there are at most
    ``max_points``; otherwise a square tensor grid of at most ``max_points``
    points over the subdomain replaces them.
    """
    pts = np.atleast_2d(points)
    if len(pts) <= max_points:
        return pts
    side = max(2, int(np.floor(np.sqrt(max_points))))
    return tensor_grid(sub.lower, sub.upper, side, side)


def _fit_loss(features: FeatureLike, local_points: np.ndarray, fields: np.ndarray,
              gamma: float, rank_tol: float) -> float:
    block = as_block(features)
    design = activation_stack(gamma * (local_points @ block.normals.T + block.offsets), 0)[0]
    coeffs = linalg.lstsq(design, fields, cond=rank_tol, lapack_driver="gelsd", check_finite=False)[0]
    residual = design @ coeffs - fields
    return float(np.mean(np.sum(residual * residual, axis=0)))


def gamma_losses(features: FeatureLike, local_points: np.ndarray, fields: np.ndarray,
                 gamma_grid: Sequence[float], workers: int = 1,
                 rank_tol: float = constants.RANK_TOL) -> np.ndarray:
    """Mean least-squares loss over the field realizations for every candidate gamma."""
    fields = np.asarray(fields, dtype=float).reshape(len(local_points), -1)
    losses = ordered_map(lambda g: _fit_loss(features, local_points, fields, g, rank_tol),
                         list(gamma_grid), workers)
    return np.array(losses)


def calibration_curve(sub: Subdomain, features: FeatureLike, colloc: np.ndarray, cfg: GrfConfig,
                      gamma_grid: Sequence[float], rng: np.random.Generator,
                      max_points: int = constants.GRF_MAX_POINTS, workers: int = 1,
                      rank_tol: float = constants.RANK_TOL) -> CalibrationResult:
    """Loss curve over ``gamma_grid`` and its argmin (first one on ties)."""
    grid = tuple(float(g) for g in gamma_grid)
    if not grid:
        raise FeatureError("Gamma grid must not be empty")
    block = as_block(features)
    if len(block) == 0 or len(np.atleast_2d(colloc)) == 0:
        raise FeatureError("Calibration needs features and collocation points")
    points = fit_points(sub, colloc, max_points)
    fields = simulate_grf(points, cfg, rng, count=cfg.realizations)
    local = to_local(sub, points)
    losses = gamma_losses(block, local, fields, grid, workers, rank_tol)
    best = int(np.argmin(losses))
    for gamma, loss in zip(grid, losses):
        logger.debug("Subdomain %d gamma=%.3f loss=%.6e", sub.index, gamma, loss)
    return CalibrationResult(gamma=grid[best], gamma_grid=grid, losses=losses)


def calibrate_gamma(sub: Subdomain, features: FeatureLike, colloc: np.ndarray, cfg: GrfConfig,
                    gamma_grid: Sequence[float], rng: np.random.Generator,
                    max_points: int = constants.GRF_MAX_POINTS, workers: int = 1) -> float:
    """Grid value minimising the mean GRF fitting loss."""
    return calibration_curve(sub, features, colloc, cfg, gamma_grid, rng, max_points, workers).gamma


def _subdomain_points(colloc: CollocationSet, n: int) -> np.ndarray:
    parts = [colloc.interior[n], colloc.boundary[n], colloc.interface.points[colloc.interface.touching(n)]]
    return np.concatenate(parts, axis=0)


def calibrate_feature_set(partition: Partition, features: FeatureSet, colloc: CollocationSet,
                          settings: CalibrationSettings,
                          streams: RandomStreams) -> Tuple[FeatureSet, np.ndarray, List[CalibrationResult]]:
    """
    Fill in every subdomain's gamma.

    In shared mode subdomain 0 is calibrated and its gamma reused everywhere;
    otherwise each subdomain draws its own fields from a per-subdomain stream.

    Returns:
        (calibrated feature set, per-subdomain base gamma, calibration results)
    """
    targets: List[int] = [0] if settings.shared else list(range(len(partition)))
    results: List[CalibrationResult] = []
    for n in targets:
        label = GRF if settings.shared else f"{GRF}/sub{n}"
        result = calibration_curve(partition[n], features[n], _subdomain_points(colloc, n),
                                   settings.grf, settings.gamma_grid, streams.fresh(label),
                                   settings.max_points, settings.workers, settings.rank_tol)
        logger.info("Calibrated gamma=%.3f on subdomain %d (%d features)",
                    result.gamma, n, len(features[n]))
        results.append(result)
    if settings.shared:
        gamma_base = np.full(len(partition), results[0].gamma)
    else:
        gamma_base = np.array([r.gamma for r in results])
    calibrated = FeatureSet(tuple(block.with_gamma(gamma_base[n]) for n, block in enumerate(features)),
                            features.activation)
    return calibrated, gamma_base, results
