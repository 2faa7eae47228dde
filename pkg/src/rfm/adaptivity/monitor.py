"""Gradient-norm monitor on the fixed sample set S."""

import logging
from dataclasses import dataclass

import numpy as np

from ..exceptions import NonFiniteMonitorError, SolverError
from ..solver import Solution, evaluate

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MonitorSet:
    """Sample points, gradient magnitudes there, and the resulting probability masses."""
    points: np.ndarray
    grad_norms: np.ndarray
    masses: np.ndarray

    def __len__(self) -> int:
        return len(self.points)


def gradient_magnitude(sol: Solution, points: np.ndarray) -> np.ndarray:
    """|grad phi| (Frobenius norm of the Jacobian for vector fields)."""
    return evaluate(sol, points, max_order=1).gradient_norm


def monitor_from_gradients(points: np.ndarray, grad_norms: np.ndarray, c1: float) -> MonitorSet:
    """
    Masses (|grad| + c1) / sum(|grad| + c1).

    Raises:
        NonFiniteMonitorError: with the first offending point
    """
    if not c1 > 0:
        raise SolverError("Monitor smoothing constant must be positive", {"c1": c1})
    points = np.atleast_2d(points)
    grad_norms = np.asarray(grad_norms, dtype=float)
    if len(points) == 0:
        raise SolverError("Monitor set is empty")
    bad = ~np.isfinite(grad_norms)
    if bad.any():
        first = int(np.flatnonzero(bad)[0])
        raise NonFiniteMonitorError("Solution gradient is not finite on the monitor set",
                                    {"point": points[first].tolist(), "bad_points": int(bad.sum())})
    weights = grad_norms + c1
    return MonitorSet(points, grad_norms, weights / np.sum(weights))


def build_monitor(sol: Solution, points: np.ndarray, c1: float) -> MonitorSet:
    monitor = monitor_from_gradients(points, gradient_magnitude(sol, points), c1)
    logger.debug("Monitor on %d points: max |grad| %.3e, max mass %.3e",
                 len(monitor), float(monitor.grad_norms.max()), float(monitor.masses.max()))
    return monitor


def monitor_mass_center(monitor: MonitorSet) -> np.ndarray:
    """Probability-weighted mean of the sample points."""
    return monitor.masses @ monitor.points
