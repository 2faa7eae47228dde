"""
Experiment runner: resolves a configuration, dispatches to the matching
driver and writes the run artifacts.
"""

import logging
import os
import time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

from rfm.adaptivity import AdaptConfig, DiscretizationConfig, SolutionHistory, SolveConfig
from rfm.drivers import PicardConfig, TimeMarchConfig, crank_nicolson_march, picard_solve, solve_stationary
from rfm.features import CalibrationSettings, GrfConfig
from rfm.geometry import build_partition
from rfm.random_streams import RandomStreams
from rfm.solver import Solution

from app.exporters import (
    export_adaptation_state, save_solution, write_errors_csv, write_json,
)
from app.problems import BaseProblem, ProblemKind, get_registry
from app.shared import (
    ADAPTATION_DIR, ERRORS_FILE, REPORT_FILE, SOLUTION_FILE, TIMINGS_FILE,
    ExperimentConfig, load_settings, resolve_config,
)

logger = logging.getLogger(__name__)

ErrorRow = Tuple[int, float, float]


@dataclass
class RunReport:
    """Everything a run produced; ``to_dict`` excludes wall-clock timings."""
    problem: str
    kind: str
    seed: int
    config: Dict[str, Any]
    errors: List[ErrorRow] = field(default_factory=list)
    history: Dict[str, Any] = field(default_factory=dict)
    timings: Dict[str, Any] = field(default_factory=dict)
    output_dir: Optional[str] = None
    solution: Optional[Solution] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "problem": self.problem,
            "kind": self.kind,
            "seed": self.seed,
            "config": self.config,
            "errors": [{"iteration": k, "linf": linf, "l2": l2} for k, linf, l2 in self.errors],
            "history": self.history,
        }


def solver_settings(config: ExperimentConfig) -> Dict[str, Any]:
    """Library-level configs built from a resolved experiment configuration."""
    return {
        "adapt": AdaptConfig(c1=config.c1, c2=config.c2, iterations=config.K, monitor_size=config.m,
                             early_stop=config.early_stop),
        "solve_config": SolveConfig(rescale=config.c, rank_tol=config.rank_tol),
        "discretization": DiscretizationConfig(features_per_subdomain=config.J_n, qx=config.qx, qy=config.qy,
                                               interior_per_subdomain=config.I_n),
        "calibration": CalibrationSettings(
            grf=GrfConfig(eta=config.eta, realizations=config.L, jitter=config.grf_jitter),
            gamma_grid=tuple(config.gamma_grid),
            max_points=config.grf_max_points,
            shared=config.shared_calibration,
            workers=config.workers,
            rank_tol=config.rank_tol,
        ),
        "streams": RandomStreams(config.seed),
        "eval_resolution": config.eval_resolution,
    }


def _reported_config(config: ExperimentConfig) -> Dict[str, Any]:
    data = config.to_dict()
    data.pop("output_dir", None)
    return data


def _history_rows(history: SolutionHistory) -> List[ErrorRow]:
    return [(r.iteration, r.linf, r.l2) for r in history if r.linf is not None]


def _run_driver(problem: BaseProblem, config: ExperimentConfig):
    partition = build_partition(problem.domain(), config.nx, config.ny)
    settings = solver_settings(config)
    definition = problem.build()

    if problem.problem_kind is ProblemKind.TIME_DEPENDENT:
        tm = TimeMarchConfig(dt=config.dt, steps=config.N, alpha=config.alpha)
        march = crank_nicolson_march(definition, partition, tm, **settings)
        rows = [(m + 1, h.final.linf, h.final.l2) for m, h in enumerate(march) if h.final.linf is not None]
        timings = {"steps": [h.timings() for h in march]}
        if march.initial is not None:
            timings["initial_projection"] = march.initial.timings()
        adaptation = {f"step_{m + 1}": h for m, h in enumerate(march)}
        return march.final, adaptation, march.to_dict(), rows, timings

    if problem.problem_kind is ProblemKind.NONLINEAR:
        picard = PicardConfig(iterations=config.picard_iterations, relaxation=config.picard_relaxation,
                              tol=config.picard_tol)
        history = picard_solve(definition, partition, picard, **settings)
    else:
        history = solve_stationary(definition, partition, **settings)
    return history, {"": history}, history.to_dict(), _history_rows(history), {"iterations": history.timings()}


def write_artifacts(report: RunReport, final_history: SolutionHistory, config: ExperimentConfig,
                    adaptation: Optional[Mapping[str, SolutionHistory]] = None) -> str:
    """
    Report, timings, errors and solution files, plus the adaptation state.

    ``adaptation`` maps a sub-folder of ``adaptation/`` to the history exported
    there; time-dependent runs use one ``step_<m>`` folder per step.
    """
    out = report.output_dir
    os.makedirs(out, exist_ok=True)
    write_json(report.to_dict(), os.path.join(out, REPORT_FILE))
    write_json(report.timings, os.path.join(out, TIMINGS_FILE))
    if report.errors:
        write_errors_csv(report.errors, os.path.join(out, ERRORS_FILE))
    save_solution(final_history.final.solution, os.path.join(out, SOLUTION_FILE))
    if config.export_fields:
        for folder, history in (adaptation or {"": final_history}).items():
            export_adaptation_state(history, os.path.join(out, ADAPTATION_DIR, folder),
                                    tau=config.tau, resolution=config.density_resolution)
    logger.info("Wrote artifacts to %s", out)
    return out


def run_experiment(source: Union[str, ExperimentConfig, Mapping[str, Any]],
                   overrides: Optional[Mapping[str, Any]] = None,
                   environ: Optional[Mapping[str, str]] = None,
                   write: bool = True) -> RunReport:
    """
    Run one experiment.

    Args:
        source: config file path, raw settings mapping or resolved configuration
        overrides: values taking precedence over the file and the environment
        environ: environment used for ``AFCM_SEED`` (``os.environ`` by default)
        write: write artifacts to ``config.output_dir``

    Raises:
        ConfigError: for unreadable or invalid configuration
        UnknownProblemError: for an unregistered problem name
        RfmError: on any solver failure
    """
    if isinstance(source, ExperimentConfig):
        config = source
    else:
        raw = load_settings(source) if isinstance(source, str) else dict(source)
        config = resolve_config(raw, overrides, environ)

    problem = get_registry().create_problem(config.problem, config)
    logger.info("Running %s (%s) with seed %d", config.problem, problem.problem_kind.value, config.seed)
    started = time.perf_counter()
    final_history, adaptation, history, rows, timings = _run_driver(problem, config)
    timings["total"] = time.perf_counter() - started

    report = RunReport(problem=config.problem, kind=problem.problem_kind.value, seed=config.seed,
                       config=_reported_config(config), errors=rows, history=history, timings=timings,
                       output_dir=config.output_dir, solution=final_history.final.solution)
    for k, linf, l2 in rows[-1:]:
        logger.info("Final errors (%d): linf %.3e, l2 %.3e", k, linf, l2)
    if write:
        write_artifacts(report, final_history, config, adaptation)
    return report
