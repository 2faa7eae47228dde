"""Problem-level drivers: stationary solves, Picard iteration and time marching."""

from .stationary import solve_stationary
from .picard import PicardConfig, PicardResult, PicardSolve, picard_iterate, picard_solve
from .crank_nicolson import (
    TimeMarchConfig,
    TimeDependentProblem,
    TimeMarchHistory,
    step_problem,
    initial_projection,
    crank_nicolson_march,
)

__all__ = [
    'solve_stationary',
    'PicardConfig',
    'PicardResult',
    'PicardSolve',
    'picard_iterate',
    'picard_solve',
    'TimeMarchConfig',
    'TimeDependentProblem',
    'TimeMarchHistory',
    'step_problem',
    'initial_projection',
    'crank_nicolson_march',
]
