"""Weighted random sampling without replacement by exponential keys."""

import numpy as np

from ..exceptions import SolverError
from .monitor import MonitorSet


def weighted_sample(monitor, k: int, rng: np.random.Generator) -> np.ndarray:
    """
    Indices of ``k`` distinct points of S drawn without replacement.

    Each point gets the key u^(1/w) with u uniform on (0, 1] and w its mass;
    the ``k`` largest keys win. Keys are compared as log(u) / w. The result is
    ordered by decreasing key.

    Args:
        monitor: a :class:`MonitorSet` or a bare mass vector
        k: number of samples
        rng: generator consumed for one uniform per point

    Raises:
        SolverError: if ``k`` exceeds the number of points
    """
    masses = monitor.masses if isinstance(monitor, MonitorSet) else np.asarray(monitor, dtype=float)
    m = len(masses)
    k = int(k)
    if k > m or k < 0:
        raise SolverError("Cannot draw more samples than monitor points", {"k": k, "m": m})
    u = 1.0 - rng.random(m)
    keys = np.log(u) / masses
    if k == m:
        return np.argsort(-keys, kind="stable")
    top = np.argpartition(-keys, k - 1)[:k] if k > 0 else np.zeros(0, dtype=int)
    return top[np.argsort(-keys[top], kind="stable")]
