"""
Plugin-based problem registry.

Each module in this package defines one or more BaseProblem subclasses; the
registry discovers them by name.
"""

from .base import BaseProblem, ProblemError, ProblemKind
from .exceptions import ProblemRegistrationError, UnknownProblemError
from .registry import ProblemRegistry, get_registry, list_available_problems

__all__ = [
    'BaseProblem',
    'ProblemError',
    'ProblemKind',
    'ProblemRegistrationError',
    'UnknownProblemError',
    'ProblemRegistry',
    'get_registry',
    'list_available_problems',
]
