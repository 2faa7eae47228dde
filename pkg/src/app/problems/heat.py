"""
Heat equation phi_t - alpha Laplacian(phi) = f on (-1,1)^2 x (0,2] with a
Gaussian peak travelling along the diagonal.
"""

import numpy as np

from rfm.drivers import TimeDependentProblem
from rfm.geometry import Domain

from .base import BaseProblem, ProblemKind

PEAK_SPEED = 0.1


class HeatPeakProblem(BaseProblem):
    problem_name = "heat_peak"
    problem_display_name = "Heat, travelling peak"
    problem_description = "exp(-1000((x - t/10)^2 + (y - t/10)^2)) on (-1,1)^2 x (0,2], Crank-Nicolson"
    problem_kind = ProblemKind.TIME_DEPENDENT
    default_overrides = {"dt": 0.2, "N": 10, "alpha": 1000.0}

    final_time = 2.0
    sharpness = 1000.0

    @classmethod
    def check_config(cls, config) -> None:
        from app.shared import ConfigError
        if abs(config.dt * config.N - cls.final_time) > 1e-9:
            raise ConfigError(f"dt * N must equal the final time {cls.final_time}",
                              {"dt": config.dt, "N": config.N})

    def domain(self) -> Domain:
        return Domain((-1.0, -1.0), (1.0, 1.0))

    def _shifted(self, points, t):
        return np.atleast_2d(points) - PEAK_SPEED * t

    def field(self, points, t):
        z = self._shifted(points, t)
        return np.exp(-self.sharpness * np.sum(z * z, axis=1))

    def laplacian(self, points, t):
        k = self.sharpness
        z = self._shifted(points, t)
        r2 = np.sum(z * z, axis=1)
        return (4.0 * k * k * r2 - 4.0 * k) * np.exp(-k * r2)

    def source(self, points, t):
        z = self._shifted(points, t)
        phi_t = 2.0 * self.sharpness * PEAK_SPEED * np.sum(z, axis=1) * self.field(points, t)
        return phi_t - self.config.alpha * self.laplacian(points, t)

    def exact(self, points):
        return self.field(points, self.final_time)

    def build(self) -> TimeDependentProblem:
        return TimeDependentProblem(
            source=self.source,
            boundary=self.field,
            initial=lambda points: self.field(points, 0.0),
            exact=self.field,
            initial_laplacian=lambda points: self.laplacian(points, 0.0),
            name=self.problem_name,
        )
