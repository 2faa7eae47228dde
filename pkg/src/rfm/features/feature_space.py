"""
Random feature functions sigma(gamma * (a . x_local + r)).

A feature is described by the unit normal ``a`` and offset ``r`` of its
partition hyperplane ``a . x_local + r = 0`` and by its shape parameter
``gamma``. Features of one subdomain are stored column-wise in
:class:`SubdomainFeatures`; :class:`FeatureFunction` is the single-feature view.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from ..exceptions import FeatureError
from .activation import ActivationKind


def _frozen(array, shape=None) -> np.ndarray:
    array = np.array(array, dtype=float)
    if shape is not None:
        array = array.reshape(shape)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class FeatureFunction:
    normal: Tuple[float, ...]
    offset: float
    gamma: Optional[float]
    subdomain: int = 0
    anchor: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        normal = tuple(float(v) for v in self.normal)
        if abs(np.linalg.norm(normal) - 1.0) > 1e-12:
            raise FeatureError("Feature normal must have unit length", {"normal": normal})
        if self.gamma is not None and not self.gamma > 0:
            raise FeatureError("Shape parameter must be positive", {"gamma": self.gamma})
        object.__setattr__(self, "normal", normal)


@dataclass(frozen=True)
class SubdomainFeatures:
    """
    The ``J_n`` features of one subdomain.

    ``gammas`` is NaN until calibrated; ``anchors`` are local-coordinate points
    on each hyperplane (the sample the hyperplane was built through, or the
    foot of the perpendicular from the subdomain centre).
    """
    subdomain: int
    normals: np.ndarray
    offsets: np.ndarray
    gammas: np.ndarray
    anchors: np.ndarray

    def __post_init__(self):
        normals = np.atleast_2d(np.array(self.normals, dtype=float))
        count, dim = normals.shape
        object.__setattr__(self, "normals", _frozen(normals))
        object.__setattr__(self, "offsets", _frozen(self.offsets, (count,)))
        object.__setattr__(self, "gammas", _frozen(self.gammas, (count,)))
        object.__setattr__(self, "anchors", _frozen(self.anchors, (count, dim)))

    def __len__(self) -> int:
        return len(self.offsets)

    @property
    def dim(self) -> int:
        return self.normals.shape[1]

    @property
    def calibrated(self) -> bool:
        return bool(np.all(np.isfinite(self.gammas)))

    def feature(self, j: int) -> FeatureFunction:
        gamma = float(self.gammas[j]) if np.isfinite(self.gammas[j]) else None
        return FeatureFunction(tuple(self.normals[j]), float(self.offsets[j]), gamma,
                               self.subdomain, tuple(self.anchors[j]))

    def functions(self) -> List[FeatureFunction]:
        return [self.feature(j) for j in range(len(self))]

    def with_gamma(self, gamma: Union[float, np.ndarray]) -> "SubdomainFeatures":
        gammas = np.broadcast_to(np.asarray(gamma, dtype=float), (len(self),))
        if not np.all(gammas > 0):
            raise FeatureError("Shape parameter must be positive", {"subdomain": self.subdomain})
        return SubdomainFeatures(self.subdomain, self.normals, self.offsets, gammas, self.anchors)

    @classmethod
    def from_functions(cls, functions: Sequence[FeatureFunction]) -> "SubdomainFeatures":
        if not functions:
            raise FeatureError("At least one feature is required")
        normals = np.array([f.normal for f in functions])
        offsets = np.array([f.offset for f in functions])
        gammas = np.array([np.nan if f.gamma is None else f.gamma for f in functions])
        anchors = np.array([f.anchor if f.anchor is not None else -f.offset * np.array(f.normal)
                            for f in functions])
        return cls(functions[0].subdomain, normals, offsets, gammas, anchors)

    def to_arrays(self) -> dict:
        return {"normals": self.normals, "offsets": self.offsets,
                "gammas": self.gammas, "anchors": self.anchors}


FeatureLike = Union[FeatureFunction, SubdomainFeatures, Sequence[FeatureFunction]]


def as_block(features: FeatureLike) -> SubdomainFeatures:
    """Normalise any feature container to a :class:`SubdomainFeatures`."""
    if isinstance(features, SubdomainFeatures):
        return features
    if isinstance(features, FeatureFunction):
        return SubdomainFeatures.from_functions([features])
    return SubdomainFeatures.from_functions(list(features))


@dataclass(frozen=True)
class FeatureSet:
    """Features of every subdomain, indexed by subdomain."""
    blocks: Tuple[SubdomainFeatures, ...]
    activation: ActivationKind = ActivationKind.TANH3

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(self.blocks))
        if self.total < 1:
            raise FeatureError("A feature set needs at least one feature")

    def __len__(self) -> int:
        return len(self.blocks)

    def __getitem__(self, n: int) -> SubdomainFeatures:
        return self.blocks[n]

    def __iter__(self):
        return iter(self.blocks)

    @property
    def counts(self) -> Tuple[int, ...]:
        return tuple(len(b) for b in self.blocks)

    @property
    def total(self) -> int:
        return sum(self.counts)

    def replace(self, n: int, block: SubdomainFeatures) -> "FeatureSet":
        blocks = list(self.blocks)
        blocks[n] = block
        return FeatureSet(tuple(blocks), self.activation)


def init_uniform_features(sub_index: int, count: int, rng, dim: int = 2) -> SubdomainFeatures:
    """
    Uniformly distributed partition hyperplanes.

    Normals are normalised standard Gaussian vectors, offsets are uniform on
    [0, 1]; gammas stay unset until calibration.

    Raises:
        FeatureError: if ``count`` is below 1
    """
    if int(count) < 1:
        raise FeatureError("At least one feature per subdomain is required", {"count": count})
    count = int(count)
    raw = np.asarray(rng.standard_normal((count, dim)), dtype=float).reshape(count, dim)
    norms = np.linalg.norm(raw, axis=1)
    # zero draws have probability zero; keep them well defined anyway
    raw[norms == 0.0] = np.eye(dim)[0]
    norms[norms == 0.0] = 1.0
    normals = raw / norms[:, None]
    offsets = np.asarray(rng.uniform(0.0, 1.0, count), dtype=float).reshape(count)
    anchors = -offsets[:, None] * normals
    return SubdomainFeatures(sub_index, normals, offsets, np.full(count, np.nan), anchors)


def hyperplane_distance(feature: FeatureFunction, x_local) -> float:
    """Distance |a . x + r| from a local point to the feature's hyperplane."""
    return abs(float(np.dot(feature.normal, np.asarray(x_local, dtype=float)) + feature.offset))


def hyperplane_distances(features: FeatureLike, x_local: np.ndarray) -> np.ndarray:
    """Distances from every point (rows) to every hyperplane (columns)."""
    block = as_block(features)
    pts = np.atleast_2d(np.asarray(x_local, dtype=float))
    return np.abs(pts @ block.normals.T + block.offsets)


def hyperplane_density(features: FeatureLike, x_local, tau: float):
    """
    Fraction of hyperplanes passing within ``tau`` of each point.

    Returns a float for a single point and an array for several.

    Raises:
        FeatureError: on an empty feature list or non-positive ``tau``
    """
    if tau <= 0:
        raise FeatureError("Density bandwidth must be positive", {"tau": tau})
    if not isinstance(features, (FeatureFunction, SubdomainFeatures)) and len(features) == 0:
        raise FeatureError("Density needs at least one feature")
    x_local = np.asarray(x_local, dtype=float)
    density = np.mean(hyperplane_distances(features, x_local) < tau, axis=1)
    return float(density[0]) if x_local.ndim == 1 else density

