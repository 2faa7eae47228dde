"""Tests for the gradient monitor, weighted sampling, regeneration and the adaptive loop."""

import numpy as np
import pytest
from scipy.stats import spearmanr

from rfm.adaptivity import (
    AdaptConfig,
    DiscretizationConfig,
    LinearSolve,
    RegenerationReport,
    SolveStrategy,
    afcm_iterate,
    build_monitor,
    initial_state,
    monitor_from_gradients,
    monitor_mass_center,
    regenerate_block,
    regenerate_collocation,
    regenerate_features,
    split_samples,
    weighted_sample,
)
from rfm.exceptions import AssemblyError, FeatureError, IterationError, NonFiniteMonitorError, SolverError
from rfm.features import FeatureSet, hyperplane_distance, init_uniform_features
from rfm.geometry import sample_collocation, to_local, uniform_points
from rfm.random_streams import MONITOR, RandomStreams
from rfm.solver import Solution


class TestMonitor:
    """Test suite for the monitor masses."""

    def test_constant_gradient_gives_uniform_masses(self):
        points = np.random.default_rng(0).uniform(0, 1, (50, 2))
        monitor = monitor_from_gradients(points, np.full(50, 3.0), 0.01)
        np.testing.assert_allclose(monitor.masses, 1 / 50, rtol=1e-14)

    def test_zero_solution_gives_uniform_masses(self, unit_square_partition):
        features = FeatureSet(tuple(init_uniform_features(n, 4, np.random.default_rng(n)).with_gamma(1.0)
                                    for n in range(2)))
        sol = Solution(unit_square_partition, features, np.zeros(8))
        monitor = build_monitor(sol, np.random.default_rng(1).uniform(0, 1, (30, 2)), 0.01)
        np.testing.assert_allclose(monitor.masses, 1 / 30)

    def test_masses_sum_to_one(self, rng):
        monitor = monitor_from_gradients(rng.uniform(0, 1, (1000, 2)), rng.exponential(5.0, 1000), 0.01)
        assert monitor.masses.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.all(monitor.masses > 0)

    def test_mass_ratio(self):
        monitor = monitor_from_gradients(np.zeros((2, 2)), np.array([0.0, 1.0]), 0.01)
        assert monitor.masses[0] / monitor.masses[1] == pytest.approx(0.01 / 1.01)

    def test_non_finite_gradient(self):
        points = np.array([[0.1, 0.2], [0.3, 0.4]])
        with pytest.raises(NonFiniteMonitorError) as excinfo:
            monitor_from_gradients(points, np.array([1.0, np.nan]), 0.01)
        assert excinfo.value.details["point"] == [0.3, 0.4]

    def test_rejects_non_positive_c1(self):
        with pytest.raises(SolverError):
            monitor_from_gradients(np.zeros((1, 2)), np.zeros(1), 0.0)

    def test_mass_center(self):
        monitor = monitor_from_gradients(np.array([[0.0, 0.0], [1.0, 1.0]]), np.array([0.0, 0.0]), 1.0)
        np.testing.assert_allclose(monitor_mass_center(monitor), [0.5, 0.5])


class TestWeightedSample:
    """Test suite for weighted_sample."""

    def test_all_points(self, rng):
        masses = rng.uniform(0.1, 1.0, 25)
        idx = weighted_sample(masses / masses.sum(), 25, rng)
        assert sorted(idx) == list(range(25))

    def test_no_duplicates(self, rng):
        masses = rng.exponential(1.0, 500)
        idx = weighted_sample(masses / masses.sum(), 200, rng)
        assert len(np.unique(idx)) == 200

    def test_dominant_point(self):
        masses = np.full(11, 0.0001)
        masses[3] = 0.999
        rng = np.random.default_rng(17)
        hits = sum(int(weighted_sample(masses, 1, rng)[0] == 3) for _ in range(1000))
        assert hits >= 990

    def test_inclusion_frequencies_follow_masses(self):
        masses = np.linspace(1.0, 20.0, 20)
        masses /= masses.sum()
        rng = np.random.default_rng(23)
        counts = np.zeros(20)
        for _ in range(10_000):
            counts[weighted_sample(masses, 5, rng)] += 1
        correlation, _ = spearmanr(counts, masses)
        assert correlation > 0.9

    def test_uniform_monitor_matches_area(self, unit_square_partition):
        """Test that a flat monitor spreads samples in proportion to subdomain area."""
        points = uniform_points(unit_square_partition.domain, 20_000, np.random.default_rng(1))
        monitor = monitor_from_gradients(points, np.zeros(len(points)), 0.01)
        idx = weighted_sample(monitor, 2000, np.random.default_rng(2))
        grouped, _ = split_samples(unit_square_partition, monitor.points[idx])
        assert abs(len(grouped[0]) - 1000) < 100

    def test_too_many(self, rng):
        with pytest.raises(SolverError):
            weighted_sample(np.full(3, 1 / 3), 4, rng)

    def test_seeded_draws_repeat(self):
        masses = np.random.default_rng(0).dirichlet(np.ones(40))
        first = weighted_sample(masses, 10, np.random.default_rng(5))
        second = weighted_sample(masses, 10, np.random.default_rng(5))
        np.testing.assert_array_equal(first, second)


class TestRegeneration:
    """Test suite for regenerate_block, regenerate_features and regenerate_collocation."""

    def test_equal_gradients_keep_base_gamma(self, rng):
        samples = rng.uniform(-1, 1, (12, 2))
        block = regenerate_block(0, samples, np.full(12, 7.0), 2.0, 50.0, rng)
        np.testing.assert_allclose(block.gammas, 2.0, rtol=1e-15)

    def test_amplification(self, rng):
        block = regenerate_block(0, np.array([[0.1, 0.2], [-0.3, 0.5]]), np.array([0.0, 100.0]), 3.4, 50.0, rng)
        np.testing.assert_allclose(block.gammas, [3.4, 10.2], rtol=1e-14)

    def test_gamma_never_below_base(self, rng):
        block = regenerate_block(0, rng.uniform(-1, 1, (100, 2)), rng.exponential(30.0, 100), 1.7, 50.0, rng)
        assert np.all(block.gammas >= 1.7)

    def test_hyperplanes_pass_through_samples(self, rng):
        samples = rng.uniform(-1, 1, (40, 2))
        block = regenerate_block(0, samples, rng.uniform(0, 5, 40), 1.0, 50.0, rng)
        for j, feature in enumerate(block.functions()):
            assert hyperplane_distance(feature, samples[j]) <= 1e-12
        np.testing.assert_allclose(np.linalg.norm(block.normals, axis=1), 1.0, atol=1e-12)
        np.testing.assert_array_equal(block.anchors, samples)

    def test_samples_grouped_by_owner(self, unit_square_partition, rng):
        points = np.array([[0.2, 0.5], [0.8, 0.5], [0.1, 0.1], [0.5, 0.9]])
        grouped, grads = split_samples(unit_square_partition, points, np.arange(4.0))
        np.testing.assert_array_equal(grads[0], [0.0, 2.0, 3.0])
        np.testing.assert_array_equal(grads[1], [1.0])
        features = regenerate_features(unit_square_partition, grouped, grads, [2.0, 2.0], 50.0, rng)
        assert features.counts == (3, 1)
        local = to_local(unit_square_partition[1], grouped[1])
        np.testing.assert_array_equal(features[1].anchors, local)

    def test_empty_subdomain_keeps_previous(self, unit_square_partition, rng):
        previous = FeatureSet(tuple(init_uniform_features(n, 5, rng).with_gamma(1.0) for n in range(2)))
        report = RegenerationReport()
        features = regenerate_features(unit_square_partition, [np.array([[0.2, 0.2]]), np.zeros((0, 2))],
                                       [np.array([1.0]), np.zeros(0)], [1.0, 1.0], 50.0, rng,
                                       previous, report)
        assert features[1] is previous[1]
        assert report.kept_features == [1]

    def test_empty_subdomain_without_previous(self, unit_square_partition, rng):
        with pytest.raises(FeatureError):
            regenerate_features(unit_square_partition, [np.array([[0.2, 0.2]]), np.zeros((0, 2))],
                                [np.array([1.0]), np.zeros(0)], [1.0, 1.0], 50.0, rng)

    def test_collocation_keeps_boundary_and_interface(self, unit_square_partition):
        prev = sample_collocation(unit_square_partition, 5, 5)
        new_interior = [np.array([[0.1, 0.3], [0.2, 0.4]]), np.zeros((0, 2))]
        colloc = regenerate_collocation(prev, new_interior)
        assert colloc.boundary is prev.boundary
        assert colloc.interface is prev.interface
        assert [len(a) for a in colloc.interior] == [2, 0]

    def test_collocation_fallback(self, unit_square_partition):
        prev = sample_collocation(unit_square_partition, 5, 5)
        report = RegenerationReport()
        samples = [np.random.default_rng(0).uniform([0, 0], [0.5, 1], (10, 2)), np.array([[0.7, 0.7]])]
        colloc = regenerate_collocation(prev, samples, min_interior=4, report=report)
        assert len(colloc.interior[0]) == 10
        assert colloc.interior[1] is prev.interior[1]
        assert report.kept_interior == [1]


class _FailingSolve(SolveStrategy):
    name = "failing"

    def __init__(self, fail_at):
        self.calls = 0
        self.fail_at = fail_at

    def solve(self, problem, partition, features, colloc, solve_config):
        if self.calls == self.fail_at:
            raise AssemblyError("boom", {"call": self.calls})
        self.calls += 1
        return LinearSolve().solve(problem, partition, features, colloc, solve_config)


class TestAfcmIterate:
    """Test suite for afcm_iterate on a small smooth problem."""

    def test_no_adaptation_is_plain_solve(self, smooth_poisson, unit_square_partition, small_solver_settings):
        settings = dict(small_solver_settings, adapt=AdaptConfig(iterations=0, monitor_size=3000))
        history = afcm_iterate(smooth_poisson, unit_square_partition, settings["adapt"],
                               settings["solve_config"], settings["discretization"], settings["calibration"],
                               RandomStreams(4), eval_resolution=settings["eval_resolution"])
        assert len(history) == 1
        assert history.monitor_points is None

        state = initial_state(unit_square_partition, settings["discretization"], settings["calibration"],
                              RandomStreams(4))
        plain = LinearSolve().solve(smooth_poisson, unit_square_partition, state.features, state.collocation,
                                    settings["solve_config"])
        np.testing.assert_array_equal(history.final.solution.coefficients, plain.solution.coefficients)

    def test_history_length_and_records(self, smooth_poisson, unit_square_partition, small_solver_settings):
        s = small_solver_settings
        history = afcm_iterate(smooth_poisson, unit_square_partition, s["adapt"], s["solve_config"],
                               s["discretization"], s["calibration"], RandomStreams(4),
                               eval_resolution=s["eval_resolution"])
        assert len(history) == 3
        assert [r.iteration for r in history] == [0, 1, 2]
        for record in history:
            assert record.linf is not None and record.l2 is not None
            assert sum(record.solution.features.counts) == 60
        data = history.to_dict()
        assert len(data["iterations"]) == 3
        assert "seconds" not in data["iterations"][0]
        assert len(history.timings()) == 3

    def test_monitor_set_drawn_once(self, smooth_poisson, unit_square_partition, small_solver_settings):
        s = small_solver_settings
        history = afcm_iterate(smooth_poisson, unit_square_partition, s["adapt"], s["solve_config"],
                               s["discretization"], s["calibration"], RandomStreams(9),
                               eval_resolution=s["eval_resolution"])
        expected = uniform_points(unit_square_partition.domain, 3000, RandomStreams(9).fresh(MONITOR))
        np.testing.assert_array_equal(history.monitor_points, expected)
        assert not history.monitor_points.flags.writeable

    def test_boundary_points_survive_adaptation(self, smooth_poisson, unit_square_partition,
                                                small_solver_settings):
        s = small_solver_settings
        history = afcm_iterate(smooth_poisson, unit_square_partition, s["adapt"], s["solve_config"],
                               s["discretization"], s["calibration"], RandomStreams(2),
                               eval_resolution=s["eval_resolution"])
        for record in history:
            assert record.collocation.boundary is history[0].collocation.boundary
            assert record.collocation.interface is history[0].collocation.interface

    def test_reproducible(self, smooth_poisson, unit_square_partition, small_solver_settings):
        s = small_solver_settings
        runs = [afcm_iterate(smooth_poisson, unit_square_partition, s["adapt"], s["solve_config"],
                             s["discretization"], s["calibration"], RandomStreams(5),
                             eval_resolution=s["eval_resolution"]) for _ in range(2)]
        for first, second in zip(*runs):
            np.testing.assert_array_equal(first.solution.coefficients, second.solution.coefficients)
            assert first.linf == second.linf

    def test_carried_state_skips_calibration(self, smooth_poisson, unit_square_partition, small_solver_settings):
        s = small_solver_settings
        state = initial_state(unit_square_partition, s["discretization"], s["calibration"], RandomStreams(1))
        history = afcm_iterate(smooth_poisson, unit_square_partition, AdaptConfig(iterations=0),
                               s["solve_config"], s["discretization"], s["calibration"], RandomStreams(1),
                               initial=state, eval_resolution=s["eval_resolution"])
        assert history[0].solution.features is state.features
        final = history.final_state()
        assert final.features is state.features
        np.testing.assert_array_equal(final.gamma_base, state.gamma_base)

    def test_budget_check(self, smooth_poisson, unit_square_partition, small_solver_settings):
        s = small_solver_settings
        with pytest.raises(SolverError):
            afcm_iterate(smooth_poisson, unit_square_partition, AdaptConfig(iterations=1, monitor_size=50),
                         s["solve_config"], s["discretization"], s["calibration"], RandomStreams(0),
                         eval_resolution=s["eval_resolution"])

    def test_failures_carry_the_iteration(self, smooth_poisson, unit_square_partition, small_solver_settings):
        s = small_solver_settings
        with pytest.raises(IterationError) as excinfo:
            afcm_iterate(smooth_poisson, unit_square_partition, s["adapt"], s["solve_config"],
                         s["discretization"], s["calibration"], RandomStreams(0), _FailingSolve(fail_at=1),
                         eval_resolution=s["eval_resolution"])
        assert excinfo.value.iteration == 1
        assert excinfo.value.phase == "assembly"
        assert isinstance(excinfo.value.__cause__, AssemblyError)

    def test_early_stop_flag(self, smooth_poisson, unit_square_partition, small_solver_settings):
        s = small_solver_settings
        adapt = AdaptConfig(iterations=6, monitor_size=3000, early_stop=True, early_stop_rtol=1e6)
        history = afcm_iterate(smooth_poisson, unit_square_partition, adapt, s["solve_config"],
                               s["discretization"], s["calibration"], RandomStreams(0),
                               eval_resolution=s["eval_resolution"])
        assert history.stopped_early
        assert len(history) == 3

    @pytest.mark.parametrize("kwargs", [{"c1": 0.0}, {"c2": -1.0}, {"iterations": -1}, {"monitor_size": 0}])
    def test_config_validation(self, kwargs):
        with pytest.raises(SolverError):
            AdaptConfig(**kwargs)

    def test_discretization_budget(self):
        assert DiscretizationConfig(qx=79, qy=79).interior_budget == 77 * 77
        assert DiscretizationConfig(interior_per_subdomain=100).interior_budget == 100
