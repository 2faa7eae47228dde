"""
Exception hierarchy for the random feature solver.

Every error carries an optional ``details`` dict with diagnostics that the
experiment runner copies into its failure message.
"""

from typing import Any, Dict, Optional


class RfmError(Exception):
    """Base exception for solver errors."""

    phase = "solver"

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.details: Dict[str, Any] = dict(details or {})


class GeometryError(RfmError):
    """Invalid domain, partition or collocation request."""
    phase = "geometry"


class FeatureError(RfmError):
    """Invalid feature parameters or feature-space request."""
    phase = "features"


class GrfFactorizationError(FeatureError):
    """Covariance factorization failed after jitter escalation."""
    phase = "calibration"


class AssemblyError(RfmError):
    """Least-squares system could not be assembled."""
    phase = "assembly"


class SystemSizingError(AssemblyError):
    """Assembled system has fewer rows than columns."""
    pass


class NonFiniteSystemError(AssemblyError):
    """Matrix or right-hand side contains non-finite entries."""
    pass


class SolverError(RfmError):
    """Least-squares solve or iteration failure."""
    phase = "solve"


class NonFiniteMonitorError(SolverError):
    """Gradient of the current solution is not finite on the monitor set."""
    phase = "monitor"


class PicardDivergenceError(SolverError):
    """Picard iterate changes kept growing."""
    phase = "picard"

    def __init__(self, message: str, iteration: int, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, details)
        self.iteration = iteration


class IterationError(SolverError):
    """Failure inside the adaptive loop, tagged with where it happened."""

    def __init__(self, message: str, iteration: int, step: Optional[int] = None,
                 phase: Optional[str] = None, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, details)
        self.iteration = iteration
        self.step = step
        if phase:
            self.phase = phase


class EvaluationError(RfmError):
    """Error norms cannot be formed."""
    phase = "evaluation"
