"""
Linear operators, problem definitions and analytic basis derivatives.

A feature on subdomain n is phi(x) = sigma(gamma * (a . x_local + r)) with
x_local = (x - x_n) / r_n, so every spatial derivative along axis i carries a
factor gamma * a_i / r_n,i from the chain rule.
"""

from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Tuple, Union

import numpy as np

from ..exceptions import AssemblyError
from ..features import FeatureLike, as_block
from ..features.activation import activation_stack
from ..geometry import Subdomain, to_local

Coefficient = Union[float, Callable[[np.ndarray], np.ndarray]]


def coefficient_values(coef: Coefficient, points: np.ndarray) -> np.ndarray:
    """Evaluate a constant or callable coefficient at every point."""
    k = len(points)
    if callable(coef):
        return np.broadcast_to(np.asarray(coef(points), dtype=float), (k,))
    return np.full(k, float(coef))


@dataclass(frozen=True)
class ScalarOperator:
    """
    sum a_ij d_i d_j + sum b_i d_i + c0 acting on one output component.

    Missing entries are zero.
    """
    second_order: Mapping[Tuple[int, int], Coefficient] = field(default_factory=dict)
    first_order: Mapping[int, Coefficient] = field(default_factory=dict)
    zeroth_order: Optional[Coefficient] = None

    @property
    def order(self) -> int:
        if self.second_order:
            return 2
        return 1 if self.first_order else 0


@dataclass(frozen=True)
class OperatorSpec:
    """One :class:`ScalarOperator` per output component; boundary operator is the Dirichlet trace."""
    components: Tuple[ScalarOperator, ...]

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        if not self.components:
            raise AssemblyError("An operator needs at least one component")

    @property
    def output_dim(self) -> int:
        return len(self.components)

    @property
    def order(self) -> int:
        return max(c.order for c in self.components)

    @classmethod
    def scalar(cls, op: ScalarOperator, output_dim: int = 1) -> "OperatorSpec":
        return cls(tuple(op for _ in range(output_dim)))

    @classmethod
    def identity(cls, output_dim: int = 1) -> "OperatorSpec":
        return cls.scalar(ScalarOperator(zeroth_order=1.0), output_dim)

    @classmethod
    def negative_laplacian(cls, dim: int = 2, output_dim: int = 1) -> "OperatorSpec":
        return cls.scalar(ScalarOperator(second_order={(i, i): -1.0 for i in range(dim)}), output_dim)

    @classmethod
    def helmholtz(cls, mass: float, diffusion: float, dim: int = 2) -> "OperatorSpec":
        """mass * phi - diffusion * Laplacian(phi)."""
        return cls.scalar(ScalarOperator(second_order={(i, i): -diffusion for i in range(dim)},
                                         zeroth_order=mass))


PointFunction = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ProblemDefinition:
    """
    L phi = f in the domain, phi = g on its boundary.

    ``dirichlet_mask`` selects the boundary points that carry Dirichlet rows
    (all of them when unset). ``linearize`` maps the previous iterate (None for
    the first) to the frozen-coefficient operator of a nonlinear problem.
    """
    operator: OperatorSpec
    source: PointFunction
    boundary: PointFunction
    initial: Optional[PointFunction] = None
    exact: Optional[PointFunction] = None
    dirichlet_mask: Optional[Callable[[np.ndarray], np.ndarray]] = None
    linearize: Optional[Callable[[Optional[object]], OperatorSpec]] = None
    name: str = "problem"

    @property
    def output_dim(self) -> int:
        return self.operator.output_dim

    @property
    def is_linear(self) -> bool:
        return self.linearize is None

    def operator_for(self, previous=None) -> OperatorSpec:
        return self.operator if self.linearize is None else self.linearize(previous)


def as_columns(values, count: int, output_dim: int) -> np.ndarray:
    """Reshape point-function output to ``(count, output_dim)``."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 0:
        arr = np.full(count, float(arr))
    return np.broadcast_to(arr.reshape(count, -1), (count, output_dim))


@dataclass(frozen=True)
class BasisDerivatives:
    """
    Basis values and derivatives at k points for J features.

    ``gradient[i]`` and ``hessian[i, j]`` have shape ``(k, J)``.
    """
    value: np.ndarray
    gradient: Optional[np.ndarray] = None
    hessian: Optional[np.ndarray] = None


def _preactivation(block, sub: Subdomain, points: np.ndarray) -> np.ndarray:
    local = to_local(sub, np.atleast_2d(points))
    return block.gammas * (local @ block.normals.T + block.offsets)


def basis_derivatives(features: FeatureLike, sub: Subdomain, points: np.ndarray,
                      order: int = 2) -> BasisDerivatives:
    """
    Values, gradients and Hessians of the features at the given points.

    gradient_i = sigma' * gamma * a_i / r_i
    hessian_ij = sigma'' * gamma^2 * a_i a_j / (r_i r_j)
    """
    block = as_block(features)
    stack = activation_stack(_preactivation(block, sub, points), order)
    if order == 0:
        return BasisDerivatives(stack[0])
    scale = block.gammas * (block.normals / sub.radius).T  # (d, J)
    gradient = stack[1][None, :, :] * scale[:, None, :]
    hessian = None
    if order >= 2:
        hessian = stack[2][None, None, :, :] * (scale[:, None, None, :] * scale[None, :, None, :])
    return BasisDerivatives(stack[0], gradient, hessian)


def apply_operator(op: Union[OperatorSpec, ScalarOperator], features: FeatureLike, sub: Subdomain,
                   points: np.ndarray, component: int = 0) -> np.ndarray:
    """
    Operator applied to every feature at every point, shape ``(k, J)``.

    Only the derivative orders the operator uses are evaluated.
    """
    if isinstance(op, OperatorSpec):
        if not 0 <= component < op.output_dim:
            raise AssemblyError("Operator component out of range",
                                {"component": component, "output_dim": op.output_dim})
        op = op.components[component]
    block = as_block(features)
    points = np.atleast_2d(points)
    stack = activation_stack(_preactivation(block, sub, points), op.order)
    scale = block.gammas * (block.normals / sub.radius).T
    result = np.zeros_like(stack[0])
    if op.zeroth_order is not None:
        result += coefficient_values(op.zeroth_order, points)[:, None] * stack[0]
    for i, coef in op.first_order.items():
        result += coefficient_values(coef, points)[:, None] * (stack[1] * scale[i])
    for (i, j), coef in op.second_order.items():
        result += coefficient_values(coef, points)[:, None] * (stack[2] * (scale[i] * scale[j]))
    return result

