"""Relative error norms on a fixed evaluation grid."""

from typing import Callable, Tuple

import numpy as np

from .exceptions import EvaluationError
from .geometry import Domain, tensor_grid
from .solver import Solution, evaluate


def evaluation_grid(domain: Domain, resolution: int) -> np.ndarray:
    """Uniform ``resolution x resolution`` grid over the closed domain."""
    return tensor_grid(domain.lower, domain.upper, int(resolution), int(resolution))


def relative_error_norms(approx: np.ndarray, exact: np.ndarray) -> Tuple[float, float]:
    """
    (max |approx - exact| / max |exact|, ||approx - exact||_2 / ||exact||_2).

    Raises:
        EvaluationError: if the exact values vanish or the inputs are empty
    """
    approx = np.asarray(approx, dtype=float).reshape(-1)
    exact = np.asarray(exact, dtype=float).reshape(-1)
    if exact.size == 0 or approx.shape != exact.shape:
        raise EvaluationError("Error norms need matching, non-empty value arrays",
                              {"approx": approx.shape, "exact": exact.shape})
    linf_ref = np.max(np.abs(exact))
    l2_ref = np.linalg.norm(exact)
    if linf_ref == 0.0 or l2_ref == 0.0:
        raise EvaluationError("Exact solution vanishes on the evaluation grid")
    diff = approx - exact
    return float(np.max(np.abs(diff)) / linf_ref), float(np.linalg.norm(diff) / l2_ref)


def relative_errors(sol: Solution, exact: Callable[[np.ndarray], np.ndarray], grid: np.ndarray) -> Tuple[float, float]:
    """Relative L-infinity and L2 errors of a solution against an exact field."""
    grid = np.atleast_2d(grid)
    if len(grid) == 0:
        raise EvaluationError("Evaluation grid is empty")
    approx = evaluate(sol, grid).value
    reference = np.asarray(exact(grid), dtype=float).reshape(approx.shape)
    return relative_error_norms(approx, reference)
