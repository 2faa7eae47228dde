"""Column layout of the unknowns and evaluation of assembled solutions."""

from dataclasses import dataclass
from typing import Iterator, Optional, Tuple

import numpy as np

from .. import constants
from ..features import FeatureSet
from ..geometry import Partition, PouKind, smooth_pou_derivatives, to_local
from ..geometry.pou import pou_support_mask
from .operators import basis_derivatives


@dataclass(frozen=True)
class ColumnMap:
    """
    Column of every (subdomain, feature, component) triple.

    Subdomain blocks are contiguous; inside a block components are stacked,
    so ``column = offset_n + component * J_n + j``.
    """
    counts: Tuple[int, ...]
    output_dim: int = 1

    @property
    def offsets(self) -> Tuple[int, ...]:
        sizes = [c * self.output_dim for c in self.counts]
        return tuple(int(v) for v in np.concatenate([[0], np.cumsum(sizes)[:-1]]))

    @property
    def total(self) -> int:
        return sum(self.counts) * self.output_dim

    def block(self, n: int, component: int = 0) -> slice:
        start = self.offsets[n] + component * self.counts[n]
        return slice(start, start + self.counts[n])

    def column(self, n: int, j: int, component: int = 0) -> int:
        return self.offsets[n] + component * self.counts[n] + j

    def entries(self) -> Iterator[Tuple[int, int, int, int]]:
        """(subdomain, feature, component, column) for every column."""
        for n, count in enumerate(self.counts):
            for comp in range(self.output_dim):
                for j in range(count):
                    yield n, j, comp, self.column(n, j, comp)

    @classmethod
    def for_features(cls, features: FeatureSet, output_dim: int = 1) -> "ColumnMap":
        return cls(features.counts, output_dim)


@dataclass(frozen=True)
class Solution:
    """Partition, features and coefficients of an approximate solution."""
    partition: Partition
    features: FeatureSet
    coefficients: np.ndarray
    output_dim: int = 1
    pou: PouKind = PouKind.INDICATOR

    def __post_init__(self):
        coeffs = np.array(self.coefficients, dtype=float).reshape(-1)
        expected = self.output_dim * self.features.total
        if coeffs.size != expected:
            raise ValueError(f"Expected {expected} coefficients, got {coeffs.size}")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "pou", PouKind(self.pou))

    @property
    def columns(self) -> ColumnMap:
        return ColumnMap.for_features(self.features, self.output_dim)

    def local_coefficients(self, n: int) -> np.ndarray:
        """Coefficients of subdomain ``n`` as a ``(J_n, output_dim)`` matrix."""
        cols = self.columns
        return np.stack([self.coefficients[cols.block(n, c)] for c in range(self.output_dim)], axis=1)

    def scaled(self, factor: float) -> "Solution":
        return Solution(self.partition, self.features, factor * self.coefficients, self.output_dim, self.pou)


@dataclass(frozen=True)
class FieldValues:
    """
    ``value`` (k, d_phi); ``gradient`` (k, d_phi, d); ``hessian`` (k, d_phi, d, d).
    """
    value: np.ndarray
    gradient: Optional[np.ndarray] = None
    hessian: Optional[np.ndarray] = None

    @property
    def laplacian(self) -> np.ndarray:
        return np.trace(self.hessian, axis1=2, axis2=3)

    @property
    def gradient_norm(self) -> np.ndarray:
        """Euclidean norm for scalar fields, Frobenius norm of the Jacobian otherwise."""
        return np.sqrt(np.sum(self.gradient ** 2, axis=(1, 2)))


def _local_field(sol: Solution, n: int, points: np.ndarray, order: int):
    sub = sol.partition[n]
    basis = basis_derivatives(sol.features[n], sub, points, order)
    coeffs = sol.local_coefficients(n)
    value = basis.value @ coeffs
    gradient = hessian = None
    if order >= 1:
        gradient = np.einsum("ikj,jc->kci", basis.gradient, coeffs)
    if order >= 2:
        hessian = np.einsum("abkj,jc->kcab", basis.hessian, coeffs)
    return value, gradient, hessian


def evaluate(sol: Solution, points: np.ndarray, with_derivatives: bool = False,
             max_order: Optional[int] = None, chunk: int = constants.EVAL_CHUNK) -> FieldValues:
    """
    Value (and derivatives) of sum_n psi_n(x) sum_j u_nj phi_nj(x).

    With the indicator weight each point is owned by exactly one subdomain
    (lower index on faces). With the smooth weight the product rule adds the
    weight's derivatives.

    Args:
        sol: solution to evaluate
        points: (k, d) global points
        with_derivatives: also return gradient and Hessian
        max_order: overrides the derivative order (0, 1 or 2)
        chunk: points evaluated per batch
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    order = max_order if max_order is not None else (2 if with_derivatives else 0)
    k, d = points.shape
    dphi = sol.output_dim
    value = np.zeros((k, dphi))
    gradient = np.zeros((k, dphi, d)) if order >= 1 else None
    hessian = np.zeros((k, dphi, d, d)) if order >= 2 else None

    if sol.pou is PouKind.INDICATOR:
        owners = sol.partition.locate(points)
        for n in range(len(sol.partition)):
            idx = np.flatnonzero(owners == n)
            for start in range(0, len(idx), chunk):
                sel = idx[start:start + chunk]
                v, g, h = _local_field(sol, n, points[sel], order)
                value[sel] = v
                if g is not None:
                    gradient[sel] = g
                if h is not None:
                    hessian[sel] = h
        return FieldValues(value, gradient, hessian)

    for n, sub in enumerate(sol.partition):
        local = to_local(sub, points)
        idx = np.flatnonzero(pou_support_mask(PouKind.SMOOTH, local))
        for start in range(0, len(idx), chunk):
            sel = idx[start:start + chunk]
            psi, dpsi, hpsi = smooth_pou_derivatives(local[sel], sub.radius)
            v, g, h = _local_field(sol, n, points[sel], order)
            value[sel] += psi[:, None] * v
            if order >= 1:
                gradient[sel] += psi[:, None, None] * g + v[:, :, None] * dpsi[:, None, :]
            if order >= 2:
                hessian[sel] += (psi[:, None, None, None] * h
                                 + g[:, :, :, None] * dpsi[:, None, None, :]
                                 + dpsi[:, None, :, None] * g[:, :, None, :]
                                 + v[:, :, None, None] * hpsi[:, None, :, :])
    return FieldValues(value, gradient, hessian)


def evaluate_values(sol: Solution, points: np.ndarray) -> np.ndarray:
    """Values of a scalar solution as a flat array."""
    return evaluate(sol, points).value[:, 0]
