"""Tests for domains, partitions, the local transform, PoU weights and collocation."""

import numpy as np
import pytest

from rfm.exceptions import GeometryError
from rfm.geometry import (
    Domain,
    PouKind,
    build_partition,
    from_local,
    partition_from_dict,
    pou_weight,
    pou_weight_1d,
    sample_collocation,
    smooth_pou_derivatives,
    tensor_grid,
    to_local,
)

SQUARE = Domain((-1.0, -1.0), (1.0, 1.0))


class TestPartition:
    """Test suite for build_partition."""

    def test_three_by_three(self):
        """Test that a 3x3 split of (-1,1)^2 gives nine cells of radius 1/3."""
        partition = build_partition(SQUARE, 3, 3)
        assert len(partition) == 9
        for sub in partition:
            np.testing.assert_allclose(sub.radius, [1 / 3, 1 / 3], atol=1e-15)

    def test_identity_split(self):
        partition = build_partition(SQUARE, 1, 1)
        assert len(partition) == 1
        np.testing.assert_array_equal(partition[0].center, [0.0, 0.0])
        np.testing.assert_array_equal(partition[0].radius, [1.0, 1.0])

    def test_two_by_one_unit_square(self, unit_square_partition):
        """Test centres and radii of a 2x1 split of the unit square."""
        centers = [sub.center for sub in unit_square_partition]
        np.testing.assert_allclose(centers, [[0.25, 0.5], [0.75, 0.5]])
        for sub in unit_square_partition:
            np.testing.assert_allclose(sub.radius, [0.25, 0.5])

    def test_row_major_indexing(self):
        partition = build_partition(SQUARE, 3, 2)
        assert partition.flat_index(2, 1) == 5
        assert partition[5].grid_index == (2, 1)
        assert partition.neighbor(0, 0, -1) is None
        assert partition.neighbor(0, 0, +1) == 1
        assert partition.neighbor(0, 1, +1) == 3

    def test_neighbours_share_faces_exactly(self):
        partition = build_partition(Domain((0.0, 0.0), (1.0, 0.7)), 7, 3)
        for sub in partition:
            right = partition.neighbor(sub.index, 0, +1)
            if right is not None:
                assert sub.upper[0] == partition[right].lower[0]

    def test_locate_prefers_lower_index_on_faces(self, unit_square_partition):
        owners = unit_square_partition.locate(np.array([[0.5, 0.3], [0.2, 0.9], [0.9, 0.1]]))
        np.testing.assert_array_equal(owners, [0, 0, 1])

    @pytest.mark.parametrize("nx,ny", [(0, 1), (1, 0), (-2, 3)])
    def test_rejects_non_positive_counts(self, nx, ny):
        with pytest.raises(GeometryError):
            build_partition(SQUARE, nx, ny)

    def test_rejects_inverted_domain(self):
        with pytest.raises(GeometryError):
            Domain((1.0, 0.0), (0.0, 1.0))

    def test_round_trip_through_dict(self):
        partition = build_partition(Domain((0.0, -1.0), (2.0, 1.0)), 4, 2)
        restored = partition_from_dict(partition.to_dict())
        assert restored.nx == 4 and restored.ny == 2
        assert restored.x_edges == partition.x_edges


class TestLocalTransform:
    """Test suite for to_local / from_local."""

    def test_unit_cell_is_identity(self):
        sub = build_partition(SQUARE, 1, 1)[0]
        np.testing.assert_allclose(to_local(sub, [0.5, 0.0]), [0.5, 0.0])

    def test_corner_maps_to_corner(self, unit_square_partition):
        sub = unit_square_partition[0]
        np.testing.assert_allclose(to_local(sub, [0.5, 1.0]), [1.0, 1.0])

    def test_center_maps_to_origin(self, unit_square_partition):
        for sub in unit_square_partition:
            np.testing.assert_allclose(to_local(sub, sub.center), [0.0, 0.0], atol=1e-15)

    def test_inverse(self, rng):
        partition = build_partition(Domain((-0.3, 2.0), (1.7, 5.0)), 3, 4)
        points = rng.uniform(-1.0, 6.0, size=(200, 2))
        for sub in partition:
            np.testing.assert_allclose(from_local(sub, to_local(sub, points)), points, atol=1e-14)

    def test_every_corner_lands_on_unit_box_corners(self):
        partition = build_partition(Domain((0.0, 0.0), (3.0, 1.0)), 3, 2)
        for sub in partition:
            corners = np.array([[x, y] for x in (sub.lower[0], sub.upper[0])
                                for y in (sub.lower[1], sub.upper[1])])
            local = to_local(sub, corners)
            np.testing.assert_allclose(np.abs(local), 1.0, atol=1e-14)


class TestPartitionOfUnity:
    """Test suite for the indicator and smooth weights."""

    def test_indicator_inside(self):
        assert pou_weight(PouKind.INDICATOR, np.array([0.5, -0.9])) == 1.0

    def test_indicator_outside(self):
        assert pou_weight(PouKind.INDICATOR, np.array([1.2, 0.0])) == 0.0

    def test_smooth_at_face(self):
        assert pou_weight_1d(PouKind.SMOOTH, np.array(1.0)) == pytest.approx(0.5, abs=1e-15)

    @pytest.mark.parametrize("t", [-1.25, 1.25, 1.5, -3.0])
    def test_smooth_vanishes_at_support_edge(self, t):
        assert pou_weight_1d(PouKind.SMOOTH, np.array(t)) == pytest.approx(0.0, abs=1e-15)

    def test_indicator_sums_to_one(self, rng):
        partition = build_partition(SQUARE, 3, 3)
        points = rng.uniform(-1.0, 1.0, size=(500, 2))
        total = sum(pou_weight(PouKind.INDICATOR, to_local(sub, points)) for sub in partition)
        np.testing.assert_array_equal(total, 1.0)

    def test_smooth_weights_of_adjacent_cells_sum_to_one(self):
        """Test that psi_n + psi_{n+1} = 1 across the overlap band in 1-D."""
        t = np.linspace(0.76, 1.24, 97)
        total = pou_weight_1d(PouKind.SMOOTH, t) + pou_weight_1d(PouKind.SMOOTH, t - 2.0)
        np.testing.assert_allclose(total, 1.0, atol=1e-12)

    def test_smooth_gradient_matches_finite_differences(self, rng):
        radius = np.array([0.5, 2.0])
        local = rng.uniform(-1.2, 1.2, size=(40, 2))
        _, grad, _ = smooth_pou_derivatives(local, radius)
        h = 1e-6
        for axis in range(2):
            step = np.zeros(2)
            step[axis] = h / radius[axis]
            fd = (pou_weight(PouKind.SMOOTH, local + step) - pou_weight(PouKind.SMOOTH, local - step)) / (2 * h)
            np.testing.assert_allclose(grad[:, axis], fd, atol=1e-6)


class TestCollocation:
    """Test suite for sample_collocation."""

    def test_single_subdomain_three_by_three(self):
        colloc = sample_collocation(build_partition(SQUARE, 1, 1), 3, 3)
        counts = colloc.counts(0)
        assert counts == {"interior": 1, "boundary": 8, "interface": 0}
        np.testing.assert_array_equal(colloc.interior[0], [[0.0, 0.0]])

    def test_default_grid_counts(self):
        partition = build_partition(SQUARE, 3, 3)
        colloc = sample_collocation(partition, 79, 79)
        # the centre cell touches no boundary: 77x77 interior plus its frame on four faces
        assert len(colloc.interior[4]) == 77 * 77
        assert len(colloc.boundary[4]) == 0

    def test_interface_points_recorded_once(self, unit_square_partition):
        colloc = sample_collocation(unit_square_partition, 5, 5)
        interface = colloc.interface
        assert len(interface) == 3
        np.testing.assert_array_equal(interface.pairs, [[0, 1]] * 3)
        np.testing.assert_array_equal(interface.axes, [0, 0, 0])
        np.testing.assert_allclose(interface.points[:, 0], 0.5)
        np.testing.assert_allclose(sorted(interface.points[:, 1]), [0.25, 0.5, 0.75])

    def test_interior_corners_recorded_once(self):
        partition = build_partition(SQUARE, 3, 3)
        interface = sample_collocation(partition, 5, 5).interface
        # twelve shared faces with three inner points each, plus four interior corners
        assert len(interface) == 40
        assert len(np.unique(interface.points, axis=0)) == 40
        corner = np.all(np.isclose(interface.points, [-1.0 / 3.0, -1.0 / 3.0]), axis=1)
        np.testing.assert_array_equal(interface.pairs[corner], [[0, 1]])

    def test_every_cell_accounts_for_its_grid(self):
        partition = build_partition(SQUARE, 3, 3)
        colloc = sample_collocation(partition, 5, 5)
        for n in range(len(partition)):
            assert sum(colloc.counts(n).values()) == 25
        assert colloc.counts(4) == {"interior": 9, "boundary": 0, "interface": 16}

    def test_roles_partition_each_grid(self, unit_square_partition):
        """Test that interior + boundary + shared-face points cover every grid point."""
        qx, qy = 6, 4
        colloc = sample_collocation(unit_square_partition, qx, qy)
        for n, sub in enumerate(unit_square_partition):
            grid = tensor_grid(sub.lower, sub.upper, qx, qy)
            on_face = np.isclose(grid[:, 0], 0.5) & ~unit_square_partition.domain.on_boundary(grid)
            counts = colloc.counts(n)
            assert counts["interior"] + counts["boundary"] + int(on_face.sum()) == qx * qy

    def test_boundary_points_lie_on_the_domain_boundary(self, unit_square_partition):
        colloc = sample_collocation(unit_square_partition, 5, 5)
        for points in colloc.boundary:
            assert unit_square_partition.domain.on_boundary(points).all()

    def test_custom_interface_density(self, unit_square_partition):
        colloc = sample_collocation(unit_square_partition, 5, 5, points_per_interface_edge=7)
        assert len(colloc.interface) == 7
        assert len(colloc.interior[0]) == 3 * 3

    def test_with_interior_keeps_boundary_and_interface(self, unit_square_partition):
        colloc = sample_collocation(unit_square_partition, 5, 5)
        updated = colloc.with_interior([np.array([[0.1, 0.1]]), np.array([[0.9, 0.9], [0.8, 0.2]])])
        assert updated.boundary is colloc.boundary
        assert updated.interface is colloc.interface
        assert updated.total_interior() == 3

    def test_arrays_are_read_only(self, unit_square_partition):
        colloc = sample_collocation(unit_square_partition, 4, 4)
        with pytest.raises(ValueError):
            colloc.interior[0][0, 0] = 3.0

    def test_rejects_tiny_grid(self, unit_square_partition):
        with pytest.raises(GeometryError):
            sample_collocation(unit_square_partition, 1, 5)
