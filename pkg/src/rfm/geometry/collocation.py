"""
Collocation points: per-subdomain tensor grids whose points are tagged as
interior, domain boundary, or interface between two neighbouring cells.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..exceptions import GeometryError
from .domain import Partition, tensor_grid

logger = logging.getLogger(__name__)


class PointRole(str, Enum):
    INTERIOR = "interior"
    BOUNDARY = "boundary"
    INTERFACE = "interface"


def _readonly(array: np.ndarray, dim: int) -> np.ndarray:
    array = np.array(array, dtype=float).reshape(-1, dim)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class InterfacePoints:
    """
    Points on shared faces, each owned once.

    ``pairs[q] = (low, high)`` are the two adjacent subdomain indices and
    ``axes[q]`` the axis normal to the shared face.
    """
    points: np.ndarray
    pairs: np.ndarray
    axes: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "points", _readonly(self.points, 2))
        pairs = np.array(self.pairs, dtype=int).reshape(-1, 2)
        axes = np.array(self.axes, dtype=int).reshape(-1)
        pairs.setflags(write=False)
        axes.setflags(write=False)
        object.__setattr__(self, "pairs", pairs)
        object.__setattr__(self, "axes", axes)

    def __len__(self) -> int:
        return len(self.points)

    def touching(self, n: int) -> np.ndarray:
        """Mask of interface points adjacent to subdomain ``n``."""
        return (self.pairs[:, 0] == n) | (self.pairs[:, 1] == n)

    @classmethod
    def empty(cls) -> "InterfacePoints":
        return cls(np.zeros((0, 2)), np.zeros((0, 2), dtype=int), np.zeros(0, dtype=int))


@dataclass(frozen=True)
class CollocationSet:
    """
    Interior and domain-boundary points per subdomain plus the shared interface list.

    ``frame_interface[n]`` counts the grid points of subdomain ``n`` that lie on a
    shared face, whichever cell owns them in the interface list.
    """
    interior: Tuple[np.ndarray, ...]
    boundary: Tuple[np.ndarray, ...]
    interface: InterfacePoints = field(default_factory=InterfacePoints.empty)
    frame_interface: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "interior", tuple(_readonly(a, 2) for a in self.interior))
        object.__setattr__(self, "boundary", tuple(_readonly(a, 2) for a in self.boundary))
        if len(self.interior) != len(self.boundary):
            raise GeometryError("Interior and boundary lists must cover the same subdomains")

    @property
    def n_subdomains(self) -> int:
        return len(self.interior)

    def pde_points(self, n: int) -> np.ndarray:
        """Points that carry PDE rows: interior followed by domain boundary."""
        return np.concatenate([self.interior[n], self.boundary[n]], axis=0)

    def counts(self, n: int) -> Dict[str, int]:
        return {
            PointRole.INTERIOR.value: len(self.interior[n]),
            PointRole.BOUNDARY.value: len(self.boundary[n]),
            PointRole.INTERFACE.value: (self.frame_interface[n] if self.frame_interface is not None
                                        else int(np.count_nonzero(self.interface.touching(n)))),
        }

    def total_interior(self) -> int:
        return sum(len(a) for a in self.interior)

    def with_interior(self, interior: Sequence[np.ndarray]) -> "CollocationSet":
        """Same boundary and interface arrays (shared, not copied) with new interior points."""
        return CollocationSet(interior=tuple(interior), boundary=self.boundary, interface=self.interface,
                              frame_interface=self.frame_interface)

    def tagged_points(self) -> List[Tuple[np.ndarray, str, np.ndarray]]:
        """(points, role, owning subdomain per point) blocks, for export."""
        blocks = []
        for n in range(self.n_subdomains):
            for role, pts in ((PointRole.INTERIOR, self.interior[n]), (PointRole.BOUNDARY, self.boundary[n])):
                blocks.append((pts, role.value, np.full(len(pts), n, dtype=int)))
        if len(self.interface):
            blocks.append((self.interface.points, PointRole.INTERFACE.value, self.interface.pairs[:, 0]))
        return blocks


def _face_neighbor(partition: Partition, n: int, point: np.ndarray) -> Optional[Tuple[int, int]]:
    """First shared face (x faces before y faces) the point lies on, as (neighbor, axis)."""
    sub = partition[n]
    for axis in (0, 1):
        if point[axis] == sub.lower[axis]:
            nb = partition.neighbor(n, axis, -1)
            if nb is not None:
                return nb, axis
        if point[axis] == sub.upper[axis]:
            nb = partition.neighbor(n, axis, +1)
            if nb is not None:
                return nb, axis
    return None


def sample_collocation(partition: Partition, qx: int, qy: int,
                       points_per_interface_edge: Optional[int] = None) -> CollocationSet:
    """
    Tensor-grid collocation with role tags.

    Each subdomain gets a ``qx x qy`` grid including its frame. Frame points on
    the domain boundary are tagged boundary, frame points on a shared face are
    tagged interface (recorded once, by the lower-index cell of the pair; an
    interior corner goes to the lowest-index cell that records it), the rest
    are interior.

    When ``points_per_interface_edge`` differs from the grid density, the grid's
    shared-face points are replaced by that many points strictly inside each
    shared face.

    Raises:
        GeometryError: if qx or qy is below 2
    """
    if int(qx) < 2 or int(qy) < 2:
        raise GeometryError("Collocation grids need at least 2 points per axis", {"qx": qx, "qy": qy})
    qx, qy = int(qx), int(qy)
    if points_per_interface_edge is not None and int(points_per_interface_edge) < 1:
        raise GeometryError("points_per_interface_edge must be positive",
                            {"points_per_interface_edge": points_per_interface_edge})
    custom_faces = points_per_interface_edge is not None and not (
        int(points_per_interface_edge) == qx == qy)

    domain = partition.domain
    interior, boundary = [], []
    face_points, face_pairs, face_axes = [], [], []
    frame_interface = []
    recorded = set()

    for sub in partition:
        n = sub.index
        grid = tensor_grid(sub.lower, sub.upper, qx, qy)
        on_boundary = domain.on_boundary(grid)
        sub_interior, sub_boundary = [], []
        on_faces = 0
        for point, is_boundary in zip(grid, on_boundary):
            if is_boundary:
                sub_boundary.append(point)
                continue
            face = _face_neighbor(partition, n, point)
            if face is None:
                sub_interior.append(point)
                continue
            if custom_faces:
                continue
            on_faces += 1
            nb, axis = face
            # interior corners meet two pairs; the first cell to reach one owns it
            if nb > n and tuple(point) not in recorded:
                recorded.add(tuple(point))
                face_points.append(point)
                face_pairs.append((n, nb))
                face_axes.append(axis)
        interior.append(np.array(sub_interior).reshape(-1, 2))
        boundary.append(np.array(sub_boundary).reshape(-1, 2))
        frame_interface.append(on_faces)

    if custom_faces:
        face_points, face_pairs, face_axes = _custom_face_points(partition, int(points_per_interface_edge))

    colloc = CollocationSet(
        interior=tuple(interior),
        boundary=tuple(boundary),
        interface=InterfacePoints(np.array(face_points).reshape(-1, 2),
                                  np.array(face_pairs, dtype=int).reshape(-1, 2),
                                  np.array(face_axes, dtype=int)),
        frame_interface=None if custom_faces else tuple(frame_interface),
    )
    logger.debug("Sampled collocation: %d subdomains, %d interior, %d interface points",
                 len(partition), colloc.total_interior(), len(colloc.interface))
    return colloc


def _custom_face_points(partition: Partition, count: int):
    points, pairs, axes = [], [], []
    for sub in partition:
        n = sub.index
        for axis in (0, 1):
            nb = partition.neighbor(n, axis, +1)
            if nb is None:
                continue
            other = 1 - axis
            along = np.linspace(sub.lower[other], sub.upper[other], count + 2)[1:-1]
            for value in along:
                point = np.empty(2)
                point[axis] = sub.upper[axis]
                point[other] = value
                points.append(point)
                pairs.append((n, nb))
                axes.append(axis)
    return points, pairs, axes
