"""
Poisson problems -Laplacian(phi) = f with Dirichlet data from the exact solution.
"""

from abc import abstractmethod
from typing import List, Tuple

import numpy as np

from rfm.geometry import Domain
from rfm.solver import OperatorSpec, ProblemDefinition

from .base import BaseProblem, ProblemKind

SQUARE = Domain((-1.0, -1.0), (1.0, 1.0))
PEAK_SHARPNESS = 1000.0


def gaussian_peak(points: np.ndarray, center: Tuple[float, float], k: float) -> np.ndarray:
    r2 = np.sum((np.atleast_2d(points) - np.asarray(center)) ** 2, axis=1)
    return np.exp(-k * r2)


def gaussian_peak_source(points: np.ndarray, center: Tuple[float, float], k: float) -> np.ndarray:
    """-Laplacian of exp(-k |x - center|^2) in two dimensions."""
    r2 = np.sum((np.atleast_2d(points) - np.asarray(center)) ** 2, axis=1)
    return (4.0 * k - 4.0 * k * k * r2) * np.exp(-k * r2)


class _PeakPoisson(BaseProblem):
    """Sum of Gaussian peaks of equal sharpness on (-1, 1)^2."""

    sharpness: float = PEAK_SHARPNESS

    @property
    @abstractmethod
    def centers(self) -> List[Tuple[float, float]]:
        pass

    def domain(self) -> Domain:
        return SQUARE

    def exact(self, points):
        return sum(gaussian_peak(points, c, self.sharpness) for c in self.centers)

    def source(self, points):
        return sum(gaussian_peak_source(points, c, self.sharpness) for c in self.centers)

    def build(self) -> ProblemDefinition:
        return ProblemDefinition(OperatorSpec.negative_laplacian(), self.source, self.exact,
                                 exact=self.exact, name=self.problem_name)


class PoissonOnePeak(_PeakPoisson):
    problem_name = "poisson_one_peak"
    problem_display_name = "Poisson, one peak"
    problem_description = "exp(-1000(x^2 + y^2)) on (-1,1)^2"
    problem_kind = ProblemKind.STATIONARY

    @property
    def centers(self):
        return [(0.0, 0.0)]


class PoissonTwoPeaks(_PeakPoisson):
    problem_name = "poisson_two_peaks"
    problem_display_name = "Poisson, two peaks"
    problem_description = "Peaks exp(-1000 r^2) at (0, 2/3) and (0, -2/3) on (-1,1)^2"
    problem_kind = ProblemKind.STATIONARY

    @property
    def centers(self):
        return [(0.0, 2.0 / 3.0), (0.0, -2.0 / 3.0)]


class _LinePoisson(BaseProblem):
    """exp(-k (x - y/20)^2): a steep ridge along the line x = y/20."""

    sharpness: float = PEAK_SHARPNESS
    slope: float = 1.0 / 20.0

    def domain(self) -> Domain:
        return SQUARE

    def exact(self, points):
        points = np.atleast_2d(points)
        s = points[:, 0] - self.slope * points[:, 1]
        return np.exp(-self.sharpness * s * s)

    def source(self, points):
        points = np.atleast_2d(points)
        k = self.sharpness
        s = points[:, 0] - self.slope * points[:, 1]
        return -(1.0 + self.slope ** 2) * (4.0 * k * k * s * s - 2.0 * k) * np.exp(-k * s * s)

    def build(self) -> ProblemDefinition:
        return ProblemDefinition(OperatorSpec.negative_laplacian(), self.source, self.exact,
                                 exact=self.exact, name=self.problem_name)


class PoissonLine(_LinePoisson):
    problem_name = "poisson_line"
    problem_display_name = "Poisson, line singularity"
    problem_description = "exp(-1000(x - y/20)^2) on (-1,1)^2"
    problem_kind = ProblemKind.STATIONARY
    default_overrides = {"m": 180_000}


class PoissonLineSharp(_LinePoisson):
    problem_name = "poisson_line_sharp"
    problem_display_name = "Poisson, sharp line singularity"
    problem_description = "exp(-7000(x - y/20)^2) on (-1,1)^2 with 9x1 subdomains"
    problem_kind = ProblemKind.STATIONARY
    default_overrides = {"nx": 9, "ny": 1, "m": 180_000}
    sharpness = 7000.0


class PoissonSmooth(BaseProblem):
    problem_name = "poisson_smooth"
    problem_display_name = "Poisson, smooth"
    problem_description = "sin(pi x) sin(pi y) on (0,1)^2; baseline without adaptation"
    problem_kind = ProblemKind.STATIONARY
    default_overrides = {"K": 0}

    def domain(self) -> Domain:
        return Domain((0.0, 0.0), (1.0, 1.0))

    def exact(self, points):
        points = np.atleast_2d(points)
        return np.sin(np.pi * points[:, 0]) * np.sin(np.pi * points[:, 1])

    def source(self, points):
        return 2.0 * np.pi ** 2 * self.exact(points)

    def build(self) -> ProblemDefinition:
        return ProblemDefinition(OperatorSpec.negative_laplacian(), self.source, self.exact,
                                 exact=self.exact, name=self.problem_name)
