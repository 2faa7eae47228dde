"""
Rectangular domains, their uniform partition into subdomains, and the local
coordinate transform that maps each subdomain onto [-1, 1]^d.
"""

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from ..exceptions import GeometryError


def _freeze(values) -> Tuple[float, ...]:
    return tuple(float(v) for v in np.asarray(values, dtype=float).ravel())


@dataclass(frozen=True)
class Domain:
    """Axis-aligned box ``lower < x < upper``."""
    lower: Tuple[float, ...]
    upper: Tuple[float, ...]

    def __post_init__(self):
        lower, upper = _freeze(self.lower), _freeze(self.upper)
        if len(lower) == 0 or len(lower) != len(upper):
            raise GeometryError("Domain corners must be non-empty and of equal length",
                                {"lower": lower, "upper": upper})
        if any(lo >= hi for lo, hi in zip(lower, upper)):
            raise GeometryError("Domain lower corner must be below the upper corner",
                                {"lower": lower, "upper": upper})
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def dim(self) -> int:
        return len(self.lower)

    @property
    def lower_array(self) -> np.ndarray:
        return np.array(self.lower)

    @property
    def upper_array(self) -> np.ndarray:
        return np.array(self.upper)

    @property
    def volume(self) -> float:
        return float(np.prod(self.upper_array - self.lower_array))

    def contains(self, points: np.ndarray, tol: float = 0.0) -> np.ndarray:
        """Membership in the closed box, widened by ``tol``."""
        pts = np.atleast_2d(points)
        return np.all((pts >= self.lower_array - tol) & (pts <= self.upper_array + tol), axis=1)

    def on_boundary(self, points: np.ndarray) -> np.ndarray:
        """Exact test against the corner coordinates."""
        pts = np.atleast_2d(points)
        return np.any((pts == self.lower_array) | (pts == self.upper_array), axis=1)

    def to_dict(self) -> dict:
        return {"lower": list(self.lower), "upper": list(self.upper)}


@dataclass(frozen=True)
class Subdomain:
    """
    One cell of a partition.

    ``lower``/``upper`` are taken from the partition's shared edge arrays so
    that neighbouring cells agree bit-for-bit on their common faces.
    """
    index: int
    grid_index: Tuple[int, int]
    lower: Tuple[float, ...]
    upper: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "lower", _freeze(self.lower))
        object.__setattr__(self, "upper", _freeze(self.upper))
        if any(lo >= hi for lo, hi in zip(self.lower, self.upper)):
            raise GeometryError("Subdomain radius must be positive",
                                {"index": self.index, "lower": self.lower, "upper": self.upper})

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (np.array(self.lower) + np.array(self.upper))

    @property
    def radius(self) -> np.ndarray:
        return 0.5 * (np.array(self.upper) - np.array(self.lower))

    @property
    def volume(self) -> float:
        return float(np.prod(np.array(self.upper) - np.array(self.lower)))

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "grid_index": list(self.grid_index),
            "center": self.center.tolist(),
            "radius": self.radius.tolist(),
        }


def to_local(sub: Subdomain, x: np.ndarray) -> np.ndarray:
    """Map global points into the subdomain frame: (x - x_n) / r_n."""
    return (np.asarray(x, dtype=float) - sub.center) / sub.radius


def from_local(sub: Subdomain, x_local: np.ndarray) -> np.ndarray:
    """Inverse of :func:`to_local`."""
    return np.asarray(x_local, dtype=float) * sub.radius + sub.center


@dataclass(frozen=True)
class Partition:
    """Row-major ``nx x ny`` grid of subdomains; index ``n = j * nx + i``."""
    domain: Domain
    nx: int
    ny: int
    subdomains: Tuple[Subdomain, ...]
    x_edges: Tuple[float, ...]
    y_edges: Tuple[float, ...]

    def __len__(self) -> int:
        return len(self.subdomains)

    def __getitem__(self, n: int) -> Subdomain:
        return self.subdomains[n]

    def __iter__(self):
        return iter(self.subdomains)

    def flat_index(self, i: int, j: int) -> int:
        return j * self.nx + i

    def neighbor(self, n: int, axis: int, side: int) -> Optional[int]:
        """Index of the cell across the ``side`` (-1 or +1) face along ``axis``."""
        i, j = self.subdomains[n].grid_index
        if axis == 0:
            i += side
        else:
            j += side
        if 0 <= i < self.nx and 0 <= j < self.ny:
            return self.flat_index(i, j)
        return None

    def locate(self, points: np.ndarray) -> np.ndarray:
        """
        Owning subdomain of each point.

        Points on a shared face go to the lower-index cell; points outside the
        domain are clamped to the nearest cell.
        """
        pts = np.atleast_2d(points)
        i = np.searchsorted(np.array(self.x_edges), pts[:, 0], side="left") - 1
        j = np.searchsorted(np.array(self.y_edges), pts[:, 1], side="left") - 1
        i = np.clip(i, 0, self.nx - 1)
        j = np.clip(j, 0, self.ny - 1)
        return j * self.nx + i

    def to_dict(self) -> dict:
        return {"domain": self.domain.to_dict(), "nx": self.nx, "ny": self.ny}


def build_partition(domain: Domain, nx: int, ny: int) -> Partition:
    """
    Split ``domain`` into ``nx * ny`` equal boxes.

    Raises:
        GeometryError: for non-positive counts or a domain that is not 2-D
    """
    if int(nx) < 1 or int(ny) < 1:
        raise GeometryError("Partition counts must be at least 1", {"nx": nx, "ny": ny})
    if domain.dim != 2:
        raise GeometryError("Only two-dimensional partitions are supported", {"dim": domain.dim})
    nx, ny = int(nx), int(ny)
    x_edges = np.linspace(domain.lower[0], domain.upper[0], nx + 1)
    y_edges = np.linspace(domain.lower[1], domain.upper[1], ny + 1)
    subdomains = []
    for j in range(ny):
        for i in range(nx):
            subdomains.append(Subdomain(
                index=j * nx + i,
                grid_index=(i, j),
                lower=(x_edges[i], y_edges[j]),
                upper=(x_edges[i + 1], y_edges[j + 1]),
            ))
    return Partition(domain=domain, nx=nx, ny=ny, subdomains=tuple(subdomains),
                     x_edges=_freeze(x_edges), y_edges=_freeze(y_edges))


def partition_from_dict(data: dict) -> Partition:
    dom = data["domain"]
    return build_partition(Domain(tuple(dom["lower"]), tuple(dom["upper"])), data["nx"], data["ny"])


def uniform_points(domain: Domain, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` points drawn uniformly from the domain."""
    lo, hi = domain.lower_array, domain.upper_array
    return lo + (hi - lo) * rng.random((int(count), domain.dim))


def tensor_grid(lower: Sequence[float], upper: Sequence[float], nx: int, ny: int) -> np.ndarray:
    """Tensor grid with x varying fastest, endpoints included."""
    xs = np.linspace(lower[0], upper[0], nx)
    ys = np.linspace(lower[1], upper[1], ny)
    gx, gy = np.meshgrid(xs, ys, indexing="xy")
    return np.column_stack([gx.ravel(), gy.ravel()])
