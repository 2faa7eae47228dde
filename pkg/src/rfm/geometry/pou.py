"""Partition-of-unity weights in local coordinates."""

from enum import Enum
from typing import Tuple

import numpy as np


class PouKind(str, Enum):
    INDICATOR = "indicator"
    SMOOTH = "smooth"


# Smooth weight: sine blend on 3/4 <= |t| <= 5/4, flat inside, zero outside.
_INNER = 0.75
_OUTER = 1.25


def pou_weight_1d(kind: PouKind, t: np.ndarray) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if PouKind(kind) is PouKind.INDICATOR:
        return ((t >= -1.0) & (t <= 1.0)).astype(float)
    return pou_derivatives_1d(t)[0]


def pou_derivatives_1d(t: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Value, first and second derivative of the smooth 1-D weight."""
    t = np.asarray(t, dtype=float)
    s = np.sin(2.0 * np.pi * t)
    c = np.cos(2.0 * np.pi * t)
    left = (t >= -_OUTER) & (t < -_INNER)
    right = (t > _INNER) & (t <= _OUTER)
    flat = (t >= -_INNER) & (t <= _INNER)

    value = np.where(flat, 1.0, 0.0)
    value = np.where(left, 0.5 * (1.0 + s), value)
    value = np.where(right, 0.5 * (1.0 - s), value)

    d1 = np.where(left, np.pi * c, 0.0)
    d1 = np.where(right, -np.pi * c, d1)

    d2 = np.where(left, -2.0 * np.pi ** 2 * s, 0.0)
    d2 = np.where(right, 2.0 * np.pi ** 2 * s, d2)
    return value, d1, d2


def pou_weight(kind: PouKind, x_local: np.ndarray) -> np.ndarray:
    """
    Product over axes of the 1-D weight.

    Args:
        kind: indicator or smooth
        x_local: point(s) in local coordinates, last axis is the dimension

    Returns:
        Weight per point (a 0-d array for a single point).
    """
    x_local = np.asarray(x_local, dtype=float)
    return np.prod(pou_weight_1d(kind, x_local), axis=-1)


def pou_support_mask(kind: PouKind, x_local: np.ndarray) -> np.ndarray:
    """Points where the weight can be nonzero."""
    bound = 1.0 if PouKind(kind) is PouKind.INDICATOR else _OUTER
    return np.all(np.abs(np.atleast_2d(x_local)) <= bound, axis=1)


def smooth_pou_derivatives(x_local: np.ndarray, radius: np.ndarray):
    """
    Smooth weight with its global-coordinate gradient and Hessian.

    Returns:
        (value (k,), gradient (k, d), hessian (k, d, d))
    """
    x_local = np.atleast_2d(x_local)
    k, d = x_local.shape
    radius = np.asarray(radius, dtype=float)
    v, d1, d2 = pou_derivatives_1d(x_local)
    value = np.prod(v, axis=1)
    grad = np.empty((k, d))
    hess = np.empty((k, d, d))
    for a in range(d):
        others = np.prod(np.delete(v, a, axis=1), axis=1)
        grad[:, a] = d1[:, a] * others / radius[a]
        hess[:, a, a] = d2[:, a] * others / radius[a] ** 2
        for b in range(a + 1, d):
            rest = np.prod(np.delete(v, [a, b], axis=1), axis=1)
            cross = d1[:, a] * d1[:, b] * rest / (radius[a] * radius[b])
            hess[:, a, b] = cross
            hess[:, b, a] = cross
    return value, grad, hess
