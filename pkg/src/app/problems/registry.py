"""
Problem Registry - Dynamic plugin discovery and management system.

This module implements a registry that automatically discovers problem plugins
in the problems directory and provides a factory for creating problem instances.
"""

import importlib
import inspect
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Type

from .base import BaseProblem
from .exceptions import ProblemRegistrationError, UnknownProblemError

logger = logging.getLogger(__name__)


class ProblemRegistry:
    """
    Registry for problem plugins.

    Handles automatic discovery of problem classes in the problems package,
    registration, and factory-based instantiation.
    """

    def __init__(self):
        self._problems: Dict[str, Type[BaseProblem]] = {}
        self._discovered = False

    def discover_problems(self) -> None:
        """
        Auto-discover problem classes from the problems package.

        Scans all .py files in the problems directory (excluding base, registry
        and exceptions) and registers every concrete BaseProblem subclass.
        """
        if self._discovered:
            return

        problems_dir = Path(__file__).parent
        for module_file in sorted(problems_dir.glob("*.py")):
            module_name = module_file.stem
            if module_name in ["__init__", "base", "registry", "exceptions"]:
                continue

            full_module_name = f"{__package__}.{module_name}"
            module = importlib.import_module(full_module_name)
            for _, obj in inspect.getmembers(module, inspect.isclass):
                if (issubclass(obj, BaseProblem) and
                        obj is not BaseProblem and
                        not inspect.isabstract(obj) and
                        obj.problem_name != "base" and
                        obj.__module__ == full_module_name):
                    if obj.problem_name in self._problems:
                        logger.warning("Problem '%s' already registered, overwriting", obj.problem_name)
                    self._problems[obj.problem_name] = obj
                    logger.debug("Registered problem: %s", obj.problem_name)

        self._discovered = True
        logger.debug("Problem discovery complete. %d problems available", len(self._problems))

    def register_problem(self, problem_class: Type[BaseProblem]) -> None:
        """
        Manually register a problem class.

        Raises:
            ProblemRegistrationError: If the class or its name is invalid or already registered
        """
        if not (inspect.isclass(problem_class) and issubclass(problem_class, BaseProblem)):
            raise ProblemRegistrationError(f"{problem_class!r} must inherit from BaseProblem")

        problem_name = problem_class.problem_name
        if not problem_name or problem_name == "base":
            raise ProblemRegistrationError(f"Invalid problem name: {problem_name}")

        if not self._discovered:
            self.discover_problems()
        if problem_name in self._problems:
            raise ProblemRegistrationError(f"Problem '{problem_name}' is already registered")

        self._problems[problem_name] = problem_class
        logger.info("Manually registered problem: %s", problem_name)

    def unregister_problem(self, problem_name: str) -> bool:
        if problem_name in self._problems:
            del self._problems[problem_name]
            return True
        return False

    def get_problem_class(self, problem_name: str) -> Optional[Type[BaseProblem]]:
        if not self._discovered:
            self.discover_problems()
        return self._problems.get(problem_name)

    def require(self, problem_name: str) -> Type[BaseProblem]:
        """
        Problem class for ``problem_name``.

        Raises:
            UnknownProblemError: listing the registered names
        """
        problem_class = self.get_problem_class(problem_name)
        if problem_class is None:
            raise UnknownProblemError(f"Unknown problem '{problem_name}'",
                                      {"available": self.names()})
        return problem_class

    def names(self) -> List[str]:
        if not self._discovered:
            self.discover_problems()
        return sorted(self._problems)

    def list_problems(self) -> List[Dict[str, Any]]:
        """Metadata of every registered problem, sorted by name."""
        return [self._problems[name].get_info() for name in self.names()]

    def create_problem(self, problem_name: str, config) -> BaseProblem:
        """Factory method to create a problem instance for a resolved configuration."""
        return self.require(problem_name)(config)

    def clear(self) -> None:
        """Clear all registered problems (useful for testing)."""
        self._problems.clear()
        self._discovered = False


# Global registry instance
_registry = ProblemRegistry()


def get_registry() -> ProblemRegistry:
    return _registry


def list_available_problems() -> List[Dict[str, Any]]:
    return get_registry().list_problems()
