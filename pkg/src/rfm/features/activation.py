"""tanh^3 activation and its analytic derivatives."""

from enum import Enum
from typing import Tuple

import numpy as np


class ActivationKind(str, Enum):
    TANH3 = "tanh3"


def activation_stack(z: np.ndarray, max_order: int = 2,
                     kind: ActivationKind = ActivationKind.TANH3) -> Tuple[np.ndarray, ...]:
    """
    sigma and its derivatives up to ``max_order``, sharing one tanh evaluation.

    With t = tanh z and s = 1 - t^2:
    sigma = t^3, sigma' = 3 t^2 s, sigma'' = 6 t s^2 - 6 t^3 s.
    """
    if ActivationKind(kind) is not ActivationKind.TANH3:
        raise ValueError(f"Unsupported activation: {kind}")
    if max_order not in (0, 1, 2):
        raise ValueError(f"Activation order must be 0, 1 or 2, got {max_order}")
    t = np.tanh(z)
    t2 = t * t
    out = [t2 * t]
    if max_order >= 1:
        s = 1.0 - t2
        out.append(3.0 * t2 * s)
        if max_order >= 2:
            out.append(6.0 * t * s * (s - t2))
    return tuple(out)


def activation(z, order: int = 0, kind: ActivationKind = ActivationKind.TANH3):
    """Derivative of the given order (0, 1 or 2) of the activation."""
    return activation_stack(np.asarray(z, dtype=float), order, kind)[order]
