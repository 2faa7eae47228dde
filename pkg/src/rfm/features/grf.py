"""Gaussian random fields with squared-exponential covariance."""

import logging
from dataclasses import asdict, dataclass
from typing import List, Optional

import numpy as np
from scipy import linalg

from .. import constants
from ..exceptions import FeatureError, GrfFactorizationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GrfConfig:
    """Correlation length ``eta``, realization count ``L`` and starting jitter."""
    eta: float = constants.GRF_ETA
    realizations: int = constants.GRF_REALIZATIONS
    jitter: float = constants.GRF_JITTER
    max_jitter: float = constants.GRF_JITTER_MAX

    def __post_init__(self):
        if not self.eta > 0:
            raise FeatureError("GRF correlation length must be positive", {"eta": self.eta})
        if int(self.realizations) < 1:
            raise FeatureError("GRF realization count must be at least 1",
                               {"realizations": self.realizations})
        if self.jitter < 0 or self.max_jitter < self.jitter:
            raise FeatureError("GRF jitter must satisfy 0 <= jitter <= max_jitter",
                               {"jitter": self.jitter, "max_jitter": self.max_jitter})

    def to_dict(self) -> dict:
        return asdict(self)


def squared_exponential_covariance(points: np.ndarray, eta: float, jitter: float = 0.0) -> np.ndarray:
    """exp(-|x - x'|^2 / (2 eta^2)) with ``jitter`` added on the diagonal."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    sq = np.sum(pts * pts, axis=1)
    dist2 = np.maximum(sq[:, None] + sq[None, :] - 2.0 * pts @ pts.T, 0.0)
    cov = np.exp(-dist2 / (2.0 * eta * eta))
    cov[np.diag_indices_from(cov)] = 1.0 + jitter
    return cov


def _jitter_ladder(start: float, stop: float) -> List[float]:
    ladder = [start]
    level = start * 10.0 if start > 0 else constants.GRF_JITTER
    while level <= stop * (1.0 + 1e-9):
        ladder.append(level)
        level *= 10.0
    return ladder


def grf_factor(points: np.ndarray, cfg: GrfConfig) -> np.ndarray:
    """
    Lower Cholesky factor of the jitter-regularised covariance.

    Jitter escalates by factors of 10 from ``cfg.jitter`` to ``cfg.max_jitter``.

    Raises:
        GrfFactorizationError: if every jitter level fails
    """
    base = squared_exponential_covariance(points, cfg.eta, 0.0)
    eye = np.eye(len(base))
    for attempt, jitter in enumerate(_jitter_ladder(cfg.jitter, cfg.max_jitter)):
        try:
            factor = linalg.cholesky(base + jitter * eye, lower=True, check_finite=False)
        except np.linalg.LinAlgError:
            logger.debug("Covariance factorization failed with jitter %.1e", jitter)
            continue
        if attempt > 0:
            logger.warning("Covariance needed jitter %.1e for %d points", jitter, len(base))
        return factor
    raise GrfFactorizationError("Covariance factorization failed after jitter escalation",
                                {"points": len(base), "max_jitter": cfg.max_jitter})


def simulate_grf(points: np.ndarray, cfg: GrfConfig, rng: np.random.Generator,
                 count: Optional[int] = None) -> np.ndarray:
    """
    Zero-mean, unit-variance field sampled jointly at ``points``.

    Returns shape ``(P,)`` for one realization, or ``(P, count)`` when
    ``count`` is given.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if len(pts) == 0:
        raise FeatureError("GRF sampling needs at least one point")
    factor = grf_factor(pts, cfg)
    n_draws = 1 if count is None else int(count)
    fields = factor @ rng.standard_normal((len(pts), n_draws))
    return fields[:, 0] if count is None else fields
