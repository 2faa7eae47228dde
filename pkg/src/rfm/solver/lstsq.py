"""Minimum-norm dense least squares with a relative rank cutoff."""

import logging
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy import linalg

from .. import constants
from ..exceptions import NonFiniteSystemError, SolverError
from .assembly import LinearSystem

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LstsqResult:
    coefficients: np.ndarray
    residual_norm: float
    rank: int
    rhs_norm: float

    @property
    def relative_residual(self) -> float:
        return self.residual_norm / self.rhs_norm if self.rhs_norm > 0 else self.residual_norm

    def to_dict(self) -> dict:
        return {"residual_norm": self.residual_norm, "rank": self.rank,
                "relative_residual": self.relative_residual}


def solve_lstsq(system: Union[LinearSystem, np.ndarray], rank_tol: float = constants.RANK_TOL,
                rhs: Optional[np.ndarray] = None) -> LstsqResult:
    """
    Solve min ||A u - f|| with the SVD-based LAPACK driver.

    Singular values below ``rank_tol`` times the largest are treated as zero,
    which selects the minimum-norm solution among all minimisers.

    Args:
        system: assembled system, or a bare matrix together with ``rhs``
        rank_tol: relative singular-value cutoff
        rhs: right-hand side when ``system`` is a matrix

    Raises:
        NonFiniteSystemError: if the matrix or right-hand side has non-finite entries
        SolverError: on an empty matrix or a LAPACK failure
    """
    if isinstance(system, LinearSystem):
        matrix, rhs = system.matrix, system.rhs
    else:
        matrix = np.atleast_2d(np.asarray(system, dtype=float))
        rhs = np.asarray(rhs, dtype=float)
    if matrix.size == 0:
        raise SolverError("Cannot solve an empty system", {"shape": list(matrix.shape)})
    if not (np.isfinite(matrix).all() and np.isfinite(rhs).all()):
        raise NonFiniteSystemError("Least-squares input has non-finite entries")
    try:
        coeffs, _, rank, _ = linalg.lstsq(matrix, rhs, cond=rank_tol,
                                          lapack_driver="gelsd", check_finite=False)
    except (linalg.LinAlgError, ValueError) as exc:
        raise SolverError(f"Least-squares solve failed: {exc}", {"shape": list(matrix.shape)}) from exc
    residual = float(np.linalg.norm(matrix @ coeffs - rhs))
    result = LstsqResult(coeffs, residual, int(rank), float(np.linalg.norm(rhs)))
    logger.debug("Solved %d x %d system: rank %d, residual %.3e",
                 matrix.shape[0], matrix.shape[1], result.rank, residual)
    return result
