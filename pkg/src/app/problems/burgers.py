"""
Viscous Burgers equation phi_t + phi phi_x - eps phi_xx = f on (0,1) x (0,1],
solved as a two-dimensional problem with t on the second axis.
"""

import numpy as np
from scipy.special import expit

from rfm.geometry import Domain
from rfm.solver import OperatorSpec, ProblemDefinition, ScalarOperator, evaluate_values

from .base import BaseProblem, ProblemKind


def burgers_operator(epsilon: float, advection=0.0) -> OperatorSpec:
    """phi_t + w phi_x - eps phi_xx with the advection coefficient w frozen."""
    return OperatorSpec.scalar(ScalarOperator(second_order={(0, 0): -epsilon},
                                              first_order={0: advection, 1: 1.0}))


class BurgersProblem(BaseProblem):
    problem_name = "burgers"
    problem_display_name = "Burgers, moving front"
    problem_description = "1 / (1 + exp((x - t) / (2 eps))) on (0,1) x (0,1], solved by Picard iteration"
    problem_kind = ProblemKind.NONLINEAR
    default_overrides = {"m": 90_000}

    final_time = 1.0

    @property
    def epsilon(self) -> float:
        return float(self.config.epsilon)

    def domain(self) -> Domain:
        return Domain((0.0, 0.0), (1.0, self.final_time))

    def exact(self, points):
        points = np.atleast_2d(points)
        return expit(-(points[:, 0] - points[:, 1]) / (2.0 * self.epsilon))

    def source(self, points):
        phi = self.exact(points)
        return phi * (1.0 - phi) / (4.0 * self.epsilon)

    def dirichlet_mask(self, points):
        """Boundary points except the open top edge t = T."""
        points = np.atleast_2d(points)
        top = points[:, 1] >= self.final_time
        inside = (points[:, 0] > 0.0) & (points[:, 0] < 1.0)
        return ~(top & inside)

    def linearize(self, previous):
        if previous is None:
            return burgers_operator(self.epsilon)
        return burgers_operator(self.epsilon, lambda points: evaluate_values(previous, points))

    def build(self) -> ProblemDefinition:
        return ProblemDefinition(self.linearize(None), self.source, self.exact, exact=self.exact,
                                 dirichlet_mask=self.dirichlet_mask, linearize=self.linearize,
                                 name=self.problem_name)
