"""
The adaptive feature capture loop.

Iteration 0 initialises uniform features, calibrates their shape parameter,
assembles and solves. Each later iteration rebuilds the gradient monitor on
the fixed sample set S, draws feature and interior-point samples from it,
regenerates both, and solves again.
"""

import logging
import time
from abc import ABC, abstractmethod
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from .. import constants
from ..exceptions import IterationError, RfmError, SolverError
from ..features import CalibrationSettings, FeatureSet, calibrate_feature_set, init_uniform_features
from ..geometry import CollocationSet, Partition, sample_collocation, uniform_points
from ..metrics import evaluation_grid, relative_errors
from ..random_streams import (
    FEATURE_INIT, MONITOR, REGEN, WRS_FEATURES, WRS_INTERIOR, RandomStreams,
)
from ..solver import ProblemDefinition, Solution, assemble_system, solve_lstsq
from .monitor import MonitorSet, build_monitor
from .regeneration import RegenerationReport, regenerate_collocation, regenerate_features, split_samples
from .sampling import weighted_sample

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AdaptConfig:
    """c1 (monitor smoothing), c2 (shape amplification smoothing), K, m."""
    c1: float = constants.MONITOR_SMOOTHING
    c2: float = constants.SHAPE_SMOOTHING
    iterations: int = constants.ADAPT_ITERATIONS
    monitor_size: int = 100_000
    early_stop: bool = False
    early_stop_rtol: float = constants.EARLY_STOP_RTOL
    min_interior: int = constants.MIN_INTERIOR_POINTS

    def __post_init__(self):
        if not (self.c1 > 0 and self.c2 > 0):
            raise SolverError("c1 and c2 must be positive", {"c1": self.c1, "c2": self.c2})
        if int(self.iterations) < 0:
            raise SolverError("Adaptation iteration count must be non-negative", {"K": self.iterations})
        if int(self.monitor_size) < 1:
            raise SolverError("Monitor sample count must be positive", {"m": self.monitor_size})

    def check_budget(self, features: int, interior: int) -> None:
        if self.iterations > 0 and self.monitor_size < features + interior:
            raise SolverError("Monitor sample count must cover the feature and interior budgets",
                              {"m": self.monitor_size, "features": features, "interior": interior})

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class DiscretizationConfig:
    """Per-subdomain budgets: J_n features, qx x qy collocation grid, I_n interior points."""
    features_per_subdomain: int = constants.DEFAULT_FEATURES_PER_SUBDOMAIN
    qx: int = constants.DEFAULT_QX
    qy: int = constants.DEFAULT_QY
    interior_per_subdomain: Optional[int] = None
    points_per_interface_edge: Optional[int] = None

    def __post_init__(self):
        if int(self.features_per_subdomain) < 1:
            raise SolverError("J_n must be positive", {"J_n": self.features_per_subdomain})
        if self.interior_per_subdomain is not None and int(self.interior_per_subdomain) < 1:
            raise SolverError("I_n must be positive", {"I_n": self.interior_per_subdomain})

    @property
    def interior_budget(self) -> int:
        if self.interior_per_subdomain is not None:
            return int(self.interior_per_subdomain)
        return max(self.qx - 2, 0) * max(self.qy - 2, 0)

    def to_dict(self) -> dict:
        data = asdict(self)
        data["interior_per_subdomain"] = self.interior_budget
        return data


@dataclass(frozen=True)
class SolveConfig:
    rescale: float = constants.RESCALE_CONSTANT
    rank_tol: float = constants.RANK_TOL

    def to_dict(self) -> dict:
        return asdict(self)


# ---------------------------------------------------------------------------
# State and history
# ---------------------------------------------------------------------------

@dataclass
class AdaptiveState:
    """Features, collocation points and base gammas; the carryover unit between time steps."""
    features: FeatureSet
    collocation: CollocationSet
    gamma_base: np.ndarray
    calibration: List[Dict[str, Any]] = field(default_factory=list)


@dataclass
class SolveOutcome:
    solution: Solution
    residual_norm: float
    rank: int
    system: Dict[str, Any]
    extra: Dict[str, Any] = field(default_factory=dict)


@dataclass
class IterationRecord:
    iteration: int
    solution: Solution
    collocation: CollocationSet
    residual_norm: float
    rank: int
    system: Dict[str, Any]
    linf: Optional[float] = None
    l2: Optional[float] = None
    regeneration: Dict[str, Any] = field(default_factory=dict)
    extra: Dict[str, Any] = field(default_factory=dict)
    seconds: float = 0.0

    def to_dict(self) -> dict:
        data = {
            "iteration": self.iteration,
            "residual_norm": self.residual_norm,
            "rank": self.rank,
            "system": self.system,
            "features_per_subdomain": list(self.solution.features.counts),
            "interior_per_subdomain": [len(a) for a in self.collocation.interior],
        }
        if self.linf is not None:
            data["linf"] = self.linf
            data["l2"] = self.l2
        if self.regeneration:
            data["regeneration"] = self.regeneration
        data.update(self.extra)
        return data


@dataclass
class SolutionHistory:
    """Every iterate of one adaptive run; index 0 is the initial solve."""
    records: List[IterationRecord] = field(default_factory=list)
    monitor_points: Optional[np.ndarray] = None
    gamma_base: Optional[np.ndarray] = None
    calibration: List[Dict[str, Any]] = field(default_factory=list)
    stopped_early: bool = False

    def __len__(self) -> int:
        return len(self.records)

    def __getitem__(self, k: int) -> IterationRecord:
        return self.records[k]

    def __iter__(self):
        return iter(self.records)

    @property
    def final(self) -> IterationRecord:
        return self.records[-1]

    def final_state(self) -> AdaptiveState:
        return AdaptiveState(self.final.solution.features, self.final.collocation,
                             np.array(self.gamma_base), list(self.calibration))

    def timings(self) -> List[float]:
        return [r.seconds for r in self.records]

    def to_dict(self) -> dict:
        return {
            "iterations": [r.to_dict() for r in self.records],
            "gamma_base": None if self.gamma_base is None else [float(g) for g in self.gamma_base],
            "calibration": self.calibration,
            "stopped_early": self.stopped_early,
        }


# ---------------------------------------------------------------------------
# Solve strategies
# ---------------------------------------------------------------------------

class SolveStrategy(ABC):
    """The "assemble and solve" unit run once per adaptive iteration."""

    name: str = "base"

    @abstractmethod
    def solve(self, problem: ProblemDefinition, partition: Partition, features: FeatureSet,
              colloc: CollocationSet, solve_config: SolveConfig) -> SolveOutcome:
        pass


class LinearSolve(SolveStrategy):
    name = "linear"

    def solve(self, problem, partition, features, colloc, solve_config):
        system = assemble_system(problem, partition, features, colloc, solve_config.rescale)
        result = solve_lstsq(system, solve_config.rank_tol)
        solution = Solution(partition, features, result.coefficients, problem.output_dim)
        return SolveOutcome(solution, result.residual_norm, result.rank, system.diagnostics())


# ---------------------------------------------------------------------------
# Loop
# ---------------------------------------------------------------------------

def initial_state(partition: Partition, discretization: DiscretizationConfig,
                  calibration: CalibrationSettings, streams: RandomStreams) -> AdaptiveState:
    """Uniform features with calibrated gammas on a tensor-grid collocation set."""
    colloc = sample_collocation(partition, discretization.qx, discretization.qy,
                                discretization.points_per_interface_edge)
    rng = streams.get(FEATURE_INIT)
    blocks = [init_uniform_features(n, discretization.features_per_subdomain, rng, partition.domain.dim)
              for n in range(len(partition))]
    features, gamma_base, results = calibrate_feature_set(partition, FeatureSet(tuple(blocks)),
                                                          colloc, calibration, streams)
    return AdaptiveState(features, colloc, gamma_base, [r.to_dict() for r in results])


def _record(k: int, outcome: SolveOutcome, colloc: CollocationSet, exact: Optional[Callable],
            grid: Optional[np.ndarray], started: float, regeneration: Optional[dict] = None) -> IterationRecord:
    linf = l2 = None
    if exact is not None and grid is not None:
        linf, l2 = relative_errors(outcome.solution, exact, grid)
    record = IterationRecord(k, outcome.solution, colloc, outcome.residual_norm, outcome.rank,
                             outcome.system, linf, l2, regeneration or {}, outcome.extra,
                             time.perf_counter() - started)
    if linf is not None:
        logger.info("Iteration %d: %s rows x %s cols, residual %.3e, linf %.3e, l2 %.3e",
                    k, outcome.system.get("rows"), outcome.system.get("cols"),
                    outcome.residual_norm, linf, l2)
    else:
        logger.info("Iteration %d: %s rows x %s cols, residual %.3e",
                    k, outcome.system.get("rows"), outcome.system.get("cols"), outcome.residual_norm)
    return record


def _stagnated(history: SolutionHistory, rtol: float) -> bool:
    if len(history) < 3:
        return False
    old, new = history[-3].residual_norm, history[-1].residual_norm
    return old > 0 and abs(new - old) / old < rtol


def afcm_iterate(problem: ProblemDefinition, partition: Partition, config: AdaptConfig,
                 solve_config: Optional[SolveConfig] = None,
                 discretization: Optional[DiscretizationConfig] = None,
                 calibration: Optional[CalibrationSettings] = None,
                 streams: Optional[RandomStreams] = None,
                 strategy: Optional[SolveStrategy] = None,
                 initial: Optional[AdaptiveState] = None,
                 eval_resolution: int = constants.EVAL_RESOLUTION,
                 step: Optional[int] = None) -> SolutionHistory:
    """
    Run K adaptive iterations after the initial solve.

    Args:
        problem: linear problem, or nonlinear with a matching ``strategy``
        partition: subdomain layout
        config: adaptation constants and budgets
        solve_config: rescaling constant and rank cutoff
        discretization: feature and collocation budgets
        calibration: gamma calibration settings (ignored with ``initial``)
        streams: labelled random streams
        strategy: the solve unit, :class:`LinearSolve` by default
        initial: carried-over state; skips initialisation and calibration
        eval_resolution: evaluation grid size for error norms
        step: time-step index, only used to tag failures

    Returns:
        History of length K + 1 (shorter only with early stopping).

    Raises:
        IterationError: wrapping any failure with the iteration index
    """
    solve_config = solve_config or SolveConfig()
    discretization = discretization or DiscretizationConfig()
    calibration = calibration or CalibrationSettings()
    streams = streams or RandomStreams(0)
    strategy = strategy or LinearSolve()
    grid = evaluation_grid(partition.domain, eval_resolution) if problem.exact is not None else None

    def guarded(k, fn, *args):
        try:
            return fn(*args)
        except IterationError:
            raise
        except RfmError as exc:
            raise IterationError(f"Iteration {k} failed in {exc.phase}: {exc}", k, step,
                                 exc.phase, exc.details) from exc

    started = time.perf_counter()
    state = initial or guarded(0, initial_state, partition, discretization, calibration, streams)
    feature_budget = int(np.sum(state.features.counts)) if initial else \
        discretization.features_per_subdomain * len(partition)
    interior_budget = discretization.interior_budget * len(partition)
    config.check_budget(feature_budget, interior_budget)

    history = SolutionHistory(gamma_base=np.array(state.gamma_base), calibration=state.calibration)
    outcome = guarded(0, strategy.solve, problem, partition, state.features, state.collocation, solve_config)
    history.records.append(_record(0, outcome, state.collocation, problem.exact, grid, started))
    if config.iterations == 0:
        return history

    history.monitor_points = uniform_points(partition.domain, config.monitor_size, streams.get(MONITOR))
    history.monitor_points.setflags(write=False)
    rng_features = streams.get(WRS_FEATURES)
    rng_interior = streams.get(WRS_INTERIOR)
    rng_regen = streams.get(REGEN)
    colloc = state.collocation

    for k in range(1, config.iterations + 1):
        started = time.perf_counter()
        previous = history.final.solution
        monitor: MonitorSet = guarded(k, build_monitor, previous, history.monitor_points, config.c1)
        feature_idx = guarded(k, weighted_sample, monitor, feature_budget, rng_features)
        interior_idx = guarded(k, weighted_sample, monitor, interior_budget, rng_interior)

        report = RegenerationReport()
        feature_points, feature_grads = split_samples(partition, monitor.points[feature_idx],
                                                      monitor.grad_norms[feature_idx])
        features = guarded(k, regenerate_features, partition, feature_points, feature_grads,
                           history.gamma_base, config.c2, rng_regen, previous.features, report)
        interior_points, _ = split_samples(partition, monitor.points[interior_idx])
        colloc = regenerate_collocation(colloc, interior_points, config.min_interior, report)

        outcome = guarded(k, strategy.solve, problem, partition, features, colloc, solve_config)
        history.records.append(_record(k, outcome, colloc, problem.exact, grid, started, report.to_dict()))
        if config.early_stop and _stagnated(history, config.early_stop_rtol):
            logger.info("Residual stagnated at iteration %d; stopping early", k)
            history.stopped_early = True
            break
    return history
