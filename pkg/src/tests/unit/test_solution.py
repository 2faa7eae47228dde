"""Tests for the least-squares solve and solution evaluation."""

import numpy as np
import pytest

from rfm.exceptions import NonFiniteSystemError, SolverError
from rfm.features import FeatureSet, activation, init_uniform_features
from rfm.geometry import Domain, PouKind, build_partition, to_local
from rfm.solver import ColumnMap, Solution, evaluate, evaluate_values, solve_lstsq


def _features(counts, seed=0, gamma=1.5):
    rng = np.random.default_rng(seed)
    return FeatureSet(tuple(init_uniform_features(n, c, rng).with_gamma(gamma) for n, c in enumerate(counts)))


class TestSolveLstsq:
    """Test suite for solve_lstsq."""

    def test_square_full_rank(self, rng):
        matrix = rng.standard_normal((6, 6)) + 6 * np.eye(6)
        rhs = rng.standard_normal(6)
        result = solve_lstsq(matrix, rhs=rhs)
        assert result.rank == 6
        assert result.residual_norm <= 1e-10 * np.linalg.norm(rhs)

    def test_minimum_norm_on_duplicated_column(self):
        matrix = np.array([[1.0, 1.0], [2.0, 2.0], [0.5, 0.5]])
        rhs = np.array([1.0, -1.0, 3.0])
        result = solve_lstsq(matrix, rhs=rhs)
        assert result.rank == 1
        # duplicated column: the minimum-norm solution splits the weight evenly
        expected = np.full(2, (matrix[:, 0] @ rhs) / (2 * matrix[:, 0] @ matrix[:, 0]))
        np.testing.assert_allclose(result.coefficients, expected, atol=1e-10)
        np.testing.assert_allclose(result.coefficients, np.linalg.pinv(matrix) @ rhs, atol=1e-10)

    def test_residual_is_optimal(self, rng):
        matrix = rng.standard_normal((40, 12))
        rhs = rng.standard_normal(40)
        result = solve_lstsq(matrix, rhs=rhs)
        assert result.residual_norm <= np.linalg.norm(rhs)
        for _ in range(100):
            perturbed = result.coefficients + 1e-3 * rng.standard_normal(12)
            assert result.residual_norm <= np.linalg.norm(matrix @ perturbed - rhs)

    def test_repeat_solves_are_bit_identical(self, rng):
        matrix = rng.standard_normal((30, 10))
        rhs = rng.standard_normal(30)
        first = solve_lstsq(matrix, rhs=rhs)
        second = solve_lstsq(matrix, rhs=rhs)
        np.testing.assert_array_equal(first.coefficients, second.coefficients)

    def test_relative_residual(self):
        result = solve_lstsq(np.array([[1.0], [1.0]]), rhs=np.array([1.0, -1.0]))
        assert result.relative_residual == pytest.approx(1.0)

    def test_non_finite_input(self):
        with pytest.raises(NonFiniteSystemError):
            solve_lstsq(np.array([[1.0, np.inf]]), rhs=np.array([1.0]))

    def test_empty_matrix(self):
        with pytest.raises(SolverError):
            solve_lstsq(np.zeros((0, 3)), rhs=np.zeros(0))


class TestColumnMap:
    def test_blocks_are_contiguous(self):
        cols = ColumnMap((3, 2), output_dim=2)
        assert cols.total == 10
        assert cols.offsets == (0, 6)
        assert cols.block(0, 1) == slice(3, 6)
        assert cols.block(1, 0) == slice(6, 8)
        assert cols.column(1, 1, 1) == 9
        assert [c for *_, c in cols.entries()] == list(range(10))


class TestEvaluate:
    """Test suite for evaluate."""

    def test_single_feature(self):
        partition = build_partition(Domain((-1.0, -1.0), (1.0, 1.0)), 1, 1)
        features = _features([1])
        sol = Solution(partition, features, [1.0])
        point = np.array([[0.3, -0.4]])
        block = features[0]
        expected = activation(block.gammas[0] * (point[0] @ block.normals[0] + block.offsets[0]))
        assert evaluate_values(sol, point)[0] == pytest.approx(expected, rel=1e-14)

    def test_zero_coefficients(self, unit_square_partition, rng):
        features = _features([4, 5])
        sol = Solution(unit_square_partition, features, np.zeros(9))
        fields = evaluate(sol, rng.uniform(0, 1, (25, 2)), with_derivatives=True)
        assert not fields.value.any()
        assert not fields.gradient.any()
        assert not fields.hessian.any()

    def test_gradient_matches_finite_differences(self, unit_square_partition, rng):
        features = _features([8, 8], seed=4)
        sol = Solution(unit_square_partition, features, rng.standard_normal(16))
        # stay clear of the shared face at x = 0.5
        points = np.vstack([rng.uniform([0.05, 0.05], [0.45, 0.95], (25, 2)),
                            rng.uniform([0.55, 0.05], [0.95, 0.95], (25, 2))])
        gradient = evaluate(sol, points, max_order=1).gradient[:, 0, :]
        h = 1e-6
        for axis in range(2):
            step = np.zeros(2)
            step[axis] = h
            fd = (evaluate_values(sol, points + step) - evaluate_values(sol, points - step)) / (2 * h)
            np.testing.assert_allclose(gradient[:, axis], fd, rtol=1e-6, atol=1e-6)

    def test_linear_in_coefficients(self, unit_square_partition, rng):
        features = _features([6, 6], seed=2)
        sol = Solution(unit_square_partition, features, rng.standard_normal(12))
        points = rng.uniform(0, 1, (40, 2))
        np.testing.assert_allclose(evaluate_values(sol.scaled(-2.5), points),
                                   -2.5 * evaluate_values(sol, points), rtol=1e-12, atol=1e-12)

    def test_indicator_owner_on_shared_face(self, unit_square_partition):
        features = _features([3, 3], seed=1)
        coefficients = np.concatenate([np.ones(3), np.zeros(3)])
        sol = Solution(unit_square_partition, features, coefficients)
        on_face = np.array([[0.5, 0.4]])
        local = to_local(unit_square_partition[0], on_face)
        block = features[0]
        expected = activation(block.gammas * (local @ block.normals.T + block.offsets)).sum()
        assert evaluate_values(sol, on_face)[0] == pytest.approx(expected, rel=1e-13)

    def test_smooth_weight_is_flat_in_the_core(self):
        partition = build_partition(Domain((-1.0, -1.0), (1.0, 1.0)), 1, 1)
        features = _features([5], seed=3)
        coefficients = np.random.default_rng(0).standard_normal(5)
        indicator = Solution(partition, features, coefficients)
        smooth = Solution(partition, features, coefficients, pou=PouKind.SMOOTH)
        core = np.random.default_rng(1).uniform(-0.7, 0.7, (20, 2))
        np.testing.assert_allclose(evaluate_values(smooth, core), evaluate_values(indicator, core), rtol=1e-14)

    def test_chunking_does_not_change_values(self, unit_square_partition, rng):
        sol = Solution(unit_square_partition, _features([5, 5]), rng.standard_normal(10))
        points = rng.uniform(0, 1, (100, 2))
        np.testing.assert_allclose(evaluate(sol, points, chunk=7).value, evaluate(sol, points).value,
                                   rtol=1e-13, atol=1e-14)

    def test_rejects_wrong_coefficient_count(self, unit_square_partition):
        with pytest.raises(ValueError):
            Solution(unit_square_partition, _features([2, 2]), np.zeros(3))
