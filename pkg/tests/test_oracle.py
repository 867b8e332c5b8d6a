import math

import numpy as np
import pytest

from omc_channel_sim.channel import ChannelParams, GeometryKind, SpacePoint
from omc_channel_sim.exceptions import DomainError
from omc_channel_sim.oracle import (
    OracleConfig,
    binomial_standard_error,
    chi_square_uniformity,
    compare_bounded,
    compare_unbounded,
    fold_into_duct,
    lane_sizes,
    reflect_at_ground,
    simulate_bounded,
    simulate_unbounded,
)

SMALL_RUN = OracleConfig(n_particles=20_000, lanes=4, seed=3)


class TestWalkHelpers:
    def test_fold_into_duct(self):
        folded = fold_into_duct(np.array([0.2, -0.2, 0.6, 0.05]), 0.125)
        np.testing.assert_allclose(folded, [0.05, -0.05, 0.1, 0.05], atol=1e-12)

    def test_folded_values_stay_inside(self):
        values = np.random.default_rng(0).normal(scale=3.0, size=1000)
        folded = fold_into_duct(values, 0.125)
        assert np.all(np.abs(folded) <= 0.125 + 1e-12)

    def test_reflect_at_ground(self):
        reflected = reflect_at_ground(np.array([-0.2, 0.3, -0.1]), 0.125)
        np.testing.assert_allclose(reflected, [-0.05, 0.3, -0.1])

    def test_lane_sizes(self):
        assert lane_sizes(10, 4) == [3, 3, 2, 2]
        assert sum(lane_sizes(1_000_001, 8)) == 1_000_001

    def test_binomial_standard_error(self):
        assert binomial_standard_error(0.5, 100) == pytest.approx(0.05)
        assert binomial_standard_error(0.0, 100) == 0.0

    def test_equal_counts_are_uniform(self):
        assert chi_square_uniformity(np.full(10, 500)) == pytest.approx(1.0)
        assert chi_square_uniformity(np.array([1000, 0, 0, 0])) < 1e-6


class TestDegenerateDiffusivity:
    def test_unbounded_exact_match(self):
        params = ChannelParams(geometry=GeometryKind.unbounded, diffusivity=0.0)
        cfg = OracleConfig(n_particles=200, lanes=2)
        estimate = simulate_unbounded(params, SpacePoint(x=1.1), cfg)
        comparison = compare_unbounded(params, estimate, cfg)
        assert comparison.exact_match is True
        assert comparison.accepted

    def test_bounded_exact_match(self):
        params = ChannelParams(diffusivity=0.0)
        cfg = OracleConfig(n_particles=200, lanes=2)
        comparison = compare_bounded(params, simulate_bounded(params, SpacePoint(x=1.1), cfg), cfg)
        assert comparison.exact_match is True
        assert comparison.accepted


class TestOracleRuns:
    def test_few_particles_are_flagged(self, bounded_params, receiver_point):
        cfg = OracleConfig(n_particles=100, lanes=2)
        comparison = compare_bounded(bounded_params, simulate_bounded(bounded_params, receiver_point, cfg), cfg)
        assert comparison.insufficient_statistics
        assert not comparison.accepted

    def test_bounded_is_deterministic_across_threads(self, bounded_params, receiver_point):
        first = simulate_bounded(bounded_params, receiver_point, SMALL_RUN, max_workers=1)
        second = simulate_bounded(bounded_params, receiver_point, SMALL_RUN, max_workers=4)
        np.testing.assert_array_equal(first.y_counts, second.y_counts)
        np.testing.assert_array_equal(first.z_counts, second.z_counts)

    def test_unbounded_is_deterministic_across_threads(self, unbounded_params, receiver_point):
        first = simulate_unbounded(unbounded_params, receiver_point, SMALL_RUN, max_workers=1)
        second = simulate_unbounded(unbounded_params, receiver_point, SMALL_RUN, max_workers=3)
        for a, b in zip(first.snapshots, second.snapshots):
            assert a.cell_count == b.cell_count
            np.testing.assert_array_equal(a.x_counts, b.x_counts)

    def test_bounded_particles_stay_in_duct(self, bounded_params, receiver_point):
        estimate = simulate_bounded(bounded_params, receiver_point, SMALL_RUN)
        assert estimate.max_abs_coordinate <= bounded_params.half_width
        assert estimate.y_counts.sum() == SMALL_RUN.n_particles

    def test_small_bounded_run_agrees(self, bounded_params, receiver_point):
        comparison = compare_bounded(
            bounded_params, simulate_bounded(bounded_params, receiver_point, SMALL_RUN), SMALL_RUN
        )
        assert len(comparison.bins) == 2 * SMALL_RUN.bins
        assert comparison.pass_fraction >= 0.9
        assert comparison.uniformity_p_value is not None

    def test_small_unbounded_run_agrees(self, unbounded_params, receiver_point):
        comparison = compare_unbounded(
            unbounded_params, simulate_unbounded(unbounded_params, receiver_point, SMALL_RUN), SMALL_RUN
        )
        assert comparison.pass_fraction >= 0.9
        assert any(b.label.startswith("cell") for b in comparison.bins)

    def test_unbounded_mean_position_follows_flow(self, unbounded_params, receiver_point):
        estimate = simulate_unbounded(unbounded_params, receiver_point, SMALL_RUN)
        n = SMALL_RUN.n_particles
        for snapshot in estimate.snapshots:
            t = snapshot.time
            standard_error = math.sqrt(2 * unbounded_params.diffusivity * t / n)
            assert abs(snapshot.mean_x(n) - unbounded_params.flow_speed * t) <= 3 * standard_error
        comparison = compare_unbounded(unbounded_params, estimate, SMALL_RUN)
        assert sum(b.label.startswith("mean x") for b in comparison.bins) == len(SMALL_RUN.snapshot_times)

    def test_well_mixed_duct_is_uniform(self, bounded_params):
        # r = K x / u = 0.1 m^2, several times l^2.
        far = SpacePoint(x=10.0)
        cfg = OracleConfig(n_particles=10_000, lanes=2, seed=5)
        estimate = simulate_bounded(bounded_params, far, cfg)
        assert estimate.travel_parameter == pytest.approx(0.1)
        assert chi_square_uniformity(estimate.y_counts) > 0.01
        assert compare_bounded(bounded_params, estimate, cfg).uniformity_p_value > 0.01

    def test_coarse_step_is_rejected(self, bounded_params, receiver_point):
        with pytest.raises(DomainError):
            simulate_bounded(bounded_params, receiver_point, OracleConfig(n_particles=100, dt=0.01))

    def test_wrong_geometry_is_rejected(self, bounded_params, receiver_point):
        with pytest.raises(DomainError):
            simulate_unbounded(bounded_params, receiver_point, SMALL_RUN)

    def test_bins_are_dumped(self, bounded_params, receiver_point, tmp_path):
        dump = tmp_path / "bins.csv"
        cfg = SMALL_RUN.model_copy(update={"dump_path": str(dump)})
        compare_bounded(bounded_params, simulate_bounded(bounded_params, receiver_point, cfg), cfg)
        assert dump.read_text().startswith("label,analytic,empirical,standard_error,passed")


@pytest.mark.slow
class TestAcceptance:
    def test_unbounded_million_particles(self, unbounded_params, receiver_point):
        cfg = OracleConfig()
        comparison = compare_unbounded(
            unbounded_params, simulate_unbounded(unbounded_params, receiver_point, cfg), cfg
        )
        assert comparison.pass_fraction >= 0.95
        assert comparison.accepted

    def test_bounded_million_particles(self, bounded_params, receiver_point):
        cfg = OracleConfig()
        comparison = compare_bounded(bounded_params, simulate_bounded(bounded_params, receiver_point, cfg), cfg)
        assert comparison.pass_fraction >= 0.95
        assert comparison.accepted
