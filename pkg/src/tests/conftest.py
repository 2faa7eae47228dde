"""
Pytest configuration and shared fixtures for the AFCM tests.
"""

import sys
from pathlib import Path

import numpy as np
import pytest

# rfm and app live in src/; the project root holds the entry scripts
_SRC_DIR = Path(__file__).resolve().parent.parent
for _path in (_SRC_DIR, _SRC_DIR.parent):
    if str(_path) not in sys.path:
        sys.path.insert(0, str(_path))

from rfm.geometry import Domain, build_partition  # noqa: E402
from rfm.random_streams import RandomStreams  # noqa: E402


@pytest.fixture
def streams():
    """Seeded random streams."""
    return RandomStreams(1234)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def unit_square():
    return Domain((0.0, 0.0), (1.0, 1.0))


@pytest.fixture
def unit_square_partition(unit_square):
    """(0,1)^2 split into 2 x 1 subdomains."""
    return build_partition(unit_square, 2, 1)


@pytest.fixture
def tmp_output_dir(tmp_path):
    out = tmp_path / "run"
    out.mkdir()
    return str(out)


@pytest.fixture
def smooth_poisson():
    """-Laplacian(u) = 2 pi^2 sin(pi x) sin(pi y) on (0,1)^2 with zero Dirichlet data."""
    from rfm.solver import OperatorSpec, ProblemDefinition

    def exact(points):
        return np.sin(np.pi * points[:, 0]) * np.sin(np.pi * points[:, 1])

    return ProblemDefinition(
        OperatorSpec.negative_laplacian(),
        lambda points: 2.0 * np.pi ** 2 * exact(points),
        exact,
        exact=exact,
        name="smooth",
    )


@pytest.fixture
def small_solver_settings():
    """Desk-sized budgets for fast loop tests on the 2 x 1 unit-square partition."""
    from rfm.adaptivity import AdaptConfig, DiscretizationConfig, SolveConfig
    from rfm.features import CalibrationSettings, GrfConfig

    return {
        "adapt": AdaptConfig(iterations=2, monitor_size=3000),
        "solve_config": SolveConfig(),
        "discretization": DiscretizationConfig(features_per_subdomain=30, qx=9, qy=9),
        "calibration": CalibrationSettings(grf=GrfConfig(realizations=2), gamma_grid=(0.5, 1.0, 2.0)),
        "eval_resolution": 33,
    }
