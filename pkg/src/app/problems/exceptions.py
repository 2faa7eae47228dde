"""
Custom exceptions for the problem plugin system.
"""

from .base import ProblemError


class ProblemRegistrationError(ProblemError):
    """Error during problem registration or discovery."""
    pass


class UnknownProblemError(ProblemError):
    """No problem is registered under the requested name."""
    phase = "config"
