"""
Picard iteration for problems with a frozen-coefficient linearization.

Each Picard step evaluates the previous iterate, builds the linear operator
from it, and re-solves on the same features and collocation points. The
whole Picard loop is the "assemble and solve" unit of the adaptive loop.
"""

import logging
from dataclasses import asdict, dataclass, field
from typing import List, Optional

import numpy as np

from .. import constants
from ..adaptivity import (
    AdaptConfig, DiscretizationConfig, SolutionHistory, SolveConfig, SolveOutcome, SolveStrategy,
    afcm_iterate,
)
from ..exceptions import PicardDivergenceError, SolverError
from ..features import CalibrationSettings, FeatureSet
from ..geometry import CollocationSet, Partition
from ..random_streams import RandomStreams
from ..solver import ProblemDefinition, Solution, assemble_system, evaluate, solve_lstsq

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PicardConfig:
    iterations: int = constants.PICARD_ITERATIONS
    relaxation: float = 1.0
    tol: Optional[float] = None
    stagnation_steps: int = constants.PICARD_STAGNATION_STEPS
    keep_iterates: bool = False

    def __post_init__(self):
        if int(self.iterations) < 1:
            raise SolverError("Picard needs at least one iteration", {"iterations": self.iterations})
        if not 0.0 < self.relaxation <= 1.0:
            raise SolverError("Picard relaxation must lie in (0, 1]", {"relaxation": self.relaxation})
        if self.tol is not None and not self.tol > 0:
            raise SolverError("Picard tolerance must be positive", {"tol": self.tol})

    def to_dict(self) -> dict:
        data = asdict(self)
        data.pop("keep_iterates")
        return data


@dataclass
class PicardResult:
    solution: Solution
    residual_norm: float
    rank: int
    system: dict
    changes: List[float] = field(default_factory=list)
    converged: bool = False
    iterates: List[np.ndarray] = field(default_factory=list)

    @property
    def iterations(self) -> int:
        return len(self.changes)


def _pde_points(colloc: CollocationSet) -> np.ndarray:
    return np.concatenate([colloc.pde_points(n) for n in range(colloc.n_subdomains)], axis=0)


def picard_iterate(problem: ProblemDefinition, partition: Partition, features: FeatureSet,
                   colloc: CollocationSet, config: PicardConfig,
                   solve_config: Optional[SolveConfig] = None) -> PicardResult:
    """
    Run the Picard loop on fixed features and collocation points.

    The first operator comes from ``problem.operator_for(None)`` (zero
    advection for Burgers). The change between iterates is the RMS difference
    of their values at the PDE collocation points.

    Raises:
        PicardDivergenceError: after ``stagnation_steps`` consecutive growing changes
    """
    solve_config = solve_config or SolveConfig()
    points = _pde_points(colloc)
    previous: Optional[Solution] = None
    previous_values = np.zeros((len(points), problem.output_dim))
    last_change = None
    growths = 0
    result: Optional[PicardResult] = None
    changes: List[float] = []
    iterates: List[np.ndarray] = []

    for s in range(1, config.iterations + 1):
        operator = problem.operator_for(previous)
        system = assemble_system(problem, partition, features, colloc, solve_config.rescale, operator)
        solved = solve_lstsq(system, solve_config.rank_tol)
        coeffs = solved.coefficients
        if previous is not None and config.relaxation < 1.0:
            coeffs = config.relaxation * coeffs + (1.0 - config.relaxation) * previous.coefficients
        current = Solution(partition, features, coeffs, problem.output_dim)
        values = evaluate(current, points).value
        change = float(np.sqrt(np.mean((values - previous_values) ** 2)))
        scale = float(np.sqrt(np.mean(values ** 2)))
        changes.append(change)
        if config.keep_iterates:
            iterates.append(np.array(current.coefficients))
        logger.info("Picard iteration %d: change %.3e, residual %.3e", s, change, solved.residual_norm)

        floor = constants.PICARD_CHANGE_FLOOR * (1.0 + scale)
        if last_change is not None and change > last_change and change > floor:
            growths += 1
            if growths >= config.stagnation_steps:
                raise PicardDivergenceError("Picard iterate changes kept growing", s,
                                            {"changes": changes[-config.stagnation_steps - 1:]})
        else:
            growths = 0
        last_change = change
        result = PicardResult(current, solved.residual_norm, solved.rank, system.diagnostics(),
                              changes, False, iterates)
        previous, previous_values = current, values
        if config.tol is not None and s > 1 and change <= config.tol * (1.0 + scale):
            result.converged = True
            logger.info("Picard converged after %d iterations", s)
            break
    return result


class PicardSolve(SolveStrategy):
    name = "picard"

    def __init__(self, config: Optional[PicardConfig] = None):
        self.config = config or PicardConfig()

    def solve(self, problem, partition, features, colloc, solve_config):
        result = picard_iterate(problem, partition, features, colloc, self.config, solve_config)
        extra = {"picard_iterations": result.iterations, "picard_changes": list(result.changes),
                 "picard_converged": result.converged}
        return SolveOutcome(result.solution, result.residual_norm, result.rank, result.system, extra)


def picard_solve(problem: ProblemDefinition, partition: Partition, picard: PicardConfig,
                 adapt: AdaptConfig, solve_config: Optional[SolveConfig] = None,
                 discretization: Optional[DiscretizationConfig] = None,
                 calibration: Optional[CalibrationSettings] = None,
                 streams: Optional[RandomStreams] = None,
                 eval_resolution: int = constants.EVAL_RESOLUTION) -> SolutionHistory:
    """Adaptive loop whose solve unit is the full Picard iteration."""
    logger.info("Picard solve of %s: %d iterations per adaptive step, K=%d",
                problem.name, picard.iterations, adapt.iterations)
    return afcm_iterate(problem, partition, adapt, solve_config, discretization, calibration,
                        streams, PicardSolve(picard), eval_resolution=eval_resolution)
