"""
Crank-Nicolson time marching for phi_t - alpha * Laplacian(phi) = f.

Every step is a stationary problem

    (I - (alpha dt / 2) Laplacian) phi^{m+1}
        = phi^m + (alpha dt / 2) Laplacian(phi^m) + (dt / 2)(f^{m+1} + f^m)

solved with K adaptive iterations. The adapted features and collocation
points of one step are the starting state of the next.
"""

import logging
from dataclasses import asdict, dataclass, field
from typing import Callable, List, Optional

import numpy as np

from .. import constants
from ..adaptivity import (
    AdaptConfig, AdaptiveState, DiscretizationConfig, LinearSolve, SolutionHistory, SolveConfig,
    afcm_iterate, build_monitor, monitor_mass_center,
)
from ..exceptions import SolverError
from ..features import CalibrationSettings
from ..geometry import Partition, uniform_points
from ..random_streams import MONITOR, RandomStreams
from ..solver import OperatorSpec, ProblemDefinition, Solution, evaluate

logger = logging.getLogger(__name__)

TimeFunction = Callable[[np.ndarray, float], np.ndarray]
PointFunction = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class TimeMarchConfig:
    dt: float
    steps: int
    alpha: float = 1.0
    t0: float = 0.0

    def __post_init__(self):
        if not self.dt > 0:
            raise SolverError("Time step must be positive", {"dt": self.dt})
        if int(self.steps) < 1:
            raise SolverError("Time march needs at least one step", {"steps": self.steps})

    @property
    def final_time(self) -> float:
        return self.t0 + self.dt * self.steps

    def time(self, m: int) -> float:
        return self.t0 + m * self.dt

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class TimeDependentProblem:
    """Source f(x, t), Dirichlet data g(x, t), initial value h(x) and optional exact field."""
    source: TimeFunction
    boundary: TimeFunction
    initial: PointFunction
    exact: Optional[TimeFunction] = None
    initial_laplacian: Optional[PointFunction] = None
    name: str = "time_dependent"


@dataclass
class TimeMarchHistory:
    """One :class:`SolutionHistory` per step, in step order."""
    steps: List[SolutionHistory] = field(default_factory=list)
    times: List[float] = field(default_factory=list)
    mass_centers: List[List[float]] = field(default_factory=list)
    initial: Optional[SolutionHistory] = None

    def __len__(self) -> int:
        return len(self.steps)

    def __getitem__(self, m: int) -> SolutionHistory:
        return self.steps[m]

    def __iter__(self):
        return iter(self.steps)

    @property
    def final(self) -> SolutionHistory:
        return self.steps[-1]

    def to_dict(self) -> dict:
        data = {
            "steps": [
                {"step": m + 1, "time": t, "mass_center": c, **h.to_dict()}
                for m, (h, t, c) in enumerate(zip(self.steps, self.times, self.mass_centers))
            ],
        }
        if self.initial is not None:
            data["initial_projection"] = self.initial.to_dict()
        return data


def _fixed(fn: TimeFunction, t: float) -> PointFunction:
    return lambda points: fn(points, t)


def step_problem(problem: TimeDependentProblem, tm: TimeMarchConfig, m: int,
                 previous_value: PointFunction, previous_laplacian: PointFunction) -> ProblemDefinition:
    """Stationary problem for the step from t^m to t^{m+1}."""
    t_now, t_next = tm.time(m), tm.time(m + 1)
    half = 0.5 * tm.alpha * tm.dt

    def source(points):
        return (np.asarray(previous_value(points), dtype=float).reshape(-1)
                + half * np.asarray(previous_laplacian(points), dtype=float).reshape(-1)
                + 0.5 * tm.dt * (np.asarray(problem.source(points, t_next), dtype=float).reshape(-1)
                                 + np.asarray(problem.source(points, t_now), dtype=float).reshape(-1)))

    exact = _fixed(problem.exact, t_next) if problem.exact is not None else None
    return ProblemDefinition(OperatorSpec.helmholtz(1.0, half), source, _fixed(problem.boundary, t_next),
                             exact=exact, name=f"{problem.name}/step{m + 1}")


def _solution_fields(sol: Solution):
    def value(points):
        return evaluate(sol, points).value[:, 0]

    def laplacian(points):
        return evaluate(sol, points, max_order=2).laplacian[:, 0]

    return value, laplacian


def initial_projection(problem: TimeDependentProblem, partition: Partition, tm: TimeMarchConfig,
                       adapt: AdaptConfig, solve_config: Optional[SolveConfig] = None,
                       discretization: Optional[DiscretizationConfig] = None,
                       calibration: Optional[CalibrationSettings] = None,
                       streams: Optional[RandomStreams] = None,
                       eval_resolution: int = constants.EVAL_RESOLUTION) -> SolutionHistory:
    """Least-squares fit of the initial value, adapted like any stationary solve."""
    streams = streams or RandomStreams(0)
    exact = _fixed(problem.exact, tm.t0) if problem.exact is not None else None
    projection = ProblemDefinition(OperatorSpec.identity(), problem.initial, _fixed(problem.boundary, tm.t0),
                                   exact=exact, name=f"{problem.name}/initial")
    logger.info("Projecting the initial value of %s", problem.name)
    return afcm_iterate(projection, partition, adapt, solve_config, discretization, calibration,
                        streams.child("initial"), LinearSolve(), eval_resolution=eval_resolution, step=0)


def _mass_center(history: SolutionHistory, partition: Partition, adapt: AdaptConfig,
                 streams: RandomStreams) -> List[float]:
    points = history.monitor_points
    if points is None:
        points = uniform_points(partition.domain, adapt.monitor_size, streams.fresh(MONITOR))
    monitor = build_monitor(history.final.solution, points, adapt.c1)
    return [float(v) for v in monitor_mass_center(monitor)]


def crank_nicolson_march(problem: TimeDependentProblem, partition: Partition, tm: TimeMarchConfig,
                         adapt: AdaptConfig, solve_config: Optional[SolveConfig] = None,
                         discretization: Optional[DiscretizationConfig] = None,
                         calibration: Optional[CalibrationSettings] = None,
                         streams: Optional[RandomStreams] = None,
                         eval_resolution: int = constants.EVAL_RESOLUTION) -> TimeMarchHistory:
    """
    March ``tm.steps`` steps from ``tm.t0``.

    Step m draws its monitor set and samples from ``streams.child("step{m}")``.
    Features are initialised and calibrated once: at the first step when an
    analytic initial Laplacian is available, otherwise by the initial-value
    projection, whose adapted state seeds the first step.

    Raises:
        IterationError: tagged with the failing step and iteration
    """
    streams = streams or RandomStreams(0)
    march = TimeMarchHistory()
    state: Optional[AdaptiveState] = None

    if problem.initial_laplacian is not None:
        previous_value, previous_laplacian = problem.initial, problem.initial_laplacian
    else:
        march.initial = initial_projection(problem, partition, tm, adapt, solve_config, discretization,
                                           calibration, streams, eval_resolution)
        previous_value, previous_laplacian = _solution_fields(march.initial.final.solution)
        state = march.initial.final_state()

    for m in range(tm.steps):
        step_streams = streams.child(f"step{m + 1}")
        stationary = step_problem(problem, tm, m, previous_value, previous_laplacian)
        history = afcm_iterate(stationary, partition, adapt, solve_config, discretization, calibration,
                               step_streams, LinearSolve(), initial=state,
                               eval_resolution=eval_resolution, step=m + 1)
        center = _mass_center(history, partition, adapt, step_streams)
        march.steps.append(history)
        march.times.append(tm.time(m + 1))
        march.mass_centers.append(center)
        final = history.final
        if final.l2 is not None:
            logger.info("Step %d (t=%.4g): linf %.3e, l2 %.3e, mass center (%.4f, %.4f)",
                        m + 1, tm.time(m + 1), final.linf, final.l2, center[0], center[1])
        else:
            logger.info("Step %d (t=%.4g): residual %.3e", m + 1, tm.time(m + 1), final.residual_norm)
        previous_value, previous_laplacian = _solution_fields(final.solution)
        state = history.final_state()
    return march
