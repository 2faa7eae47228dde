"""Stationary linear problems: the adaptive loop with the plain least-squares solve."""

import logging
from typing import Optional

from .. import constants
from ..adaptivity import (
    AdaptConfig, DiscretizationConfig, LinearSolve, SolutionHistory, SolveConfig, afcm_iterate,
)
from ..exceptions import SolverError
from ..features import CalibrationSettings
from ..geometry import Partition
from ..random_streams import RandomStreams
from ..solver import ProblemDefinition

logger = logging.getLogger(__name__)


def solve_stationary(problem: ProblemDefinition, partition: Partition, adapt: AdaptConfig,
                     solve_config: Optional[SolveConfig] = None,
                     discretization: Optional[DiscretizationConfig] = None,
                     calibration: Optional[CalibrationSettings] = None,
                     streams: Optional[RandomStreams] = None,
                     eval_resolution: int = constants.EVAL_RESOLUTION) -> SolutionHistory:
    """
    Solve a linear problem with K adaptive iterations.

    Raises:
        SolverError: if the problem carries a linearization hook
    """
    if not problem.is_linear:
        raise SolverError("Stationary solve needs a linear problem; use picard_solve",
                          {"problem": problem.name})
    logger.info("Solving %s on %d subdomains with K=%d", problem.name, len(partition), adapt.iterations)
    return afcm_iterate(problem, partition, adapt, solve_config, discretization, calibration,
                        streams, LinearSolve(), eval_resolution=eval_resolution)
