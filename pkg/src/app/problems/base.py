"""
Base problem interface for the plugin-based problem registry.

Every experiment is a self-contained class naming its domain, its exact
solution (when known) and how to build the solver-level problem from a
resolved configuration.
"""

from abc import ABC, abstractmethod
from enum import Enum
from typing import Any, Dict, Optional, Union, TYPE_CHECKING

import numpy as np

from rfm.drivers import TimeDependentProblem
from rfm.exceptions import RfmError
from rfm.geometry import Domain
from rfm.solver import ProblemDefinition

if TYPE_CHECKING:
    from app.shared import ExperimentConfig


class ProblemKind(Enum):
    """Which driver runs a problem."""
    STATIONARY = "stationary"
    NONLINEAR = "nonlinear"
    TIME_DEPENDENT = "time_dependent"


class ProblemError(RfmError):
    """Base exception for problem-registry errors."""
    phase = "problem"


class BaseProblem(ABC):
    """Abstract base class that all registered problems must inherit from."""

    problem_name: str = "base"
    problem_display_name: str = "Base Problem"
    problem_description: str = "Base problem class - should not be instantiated directly"
    problem_kind: ProblemKind = ProblemKind.STATIONARY
    default_overrides: Dict[str, Any] = {}

    def __init__(self, config: "ExperimentConfig"):
        self.config = config

    @classmethod
    def check_config(cls, config: "ExperimentConfig") -> None:
        """Reject configurations this problem cannot run. Override in subclasses if needed."""
        pass

    @abstractmethod
    def domain(self) -> Domain:
        pass

    @abstractmethod
    def build(self) -> Union[ProblemDefinition, TimeDependentProblem]:
        """Solver-level problem for the configured parameters."""
        pass

    def exact(self, points: np.ndarray) -> Optional[np.ndarray]:
        """Exact solution at the final time, if known."""
        return None

    @classmethod
    def get_info(cls) -> Dict[str, Any]:
        return {
            "name": cls.problem_name,
            "display_name": cls.problem_display_name,
            "description": cls.problem_description,
            "kind": cls.problem_kind.value,
            "defaults": dict(cls.default_overrides),
        }
