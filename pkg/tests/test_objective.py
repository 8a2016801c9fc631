"""Tests for the download-time objective and its derivatives."""

import numpy as np
import pytest

from fogcache import (
    ContentLibrary,
    FogCluster,
    Placement,
    Scenario,
    TrafficProfile,
    adt_curvature,
    adt_curve,
    adt_of_echr,
    adt_slope,
    d2_adt_dh2,
    echr,
    grad_overall_adt,
    overall_adt,
    queue_split,
    stable_echr_interval,
)
from fogcache.objective import require_equal_sizes

from conftest import make_scenario, random_feasible_placement, random_scenario


def _reference_traffic():
    return TrafficProfile([4.0], [8.0], [6.0])


class TestEchr:
    def test_weights_fractions_by_popularity(self):
        library = ContentLibrary([0.5, 0.3, 0.2])
        placement = Placement(np.array([[1.0, 0.5, 0.0]]))
        assert echr(placement, library) == pytest.approx(0.5 + 0.15)

    def test_sums_rows_before_weighting(self):
        library = ContentLibrary([0.6, 0.4])
        placement = Placement(np.array([[0.5, 0.0], [0.5, 1.0]]))
        assert echr(placement, library) == pytest.approx(1.0)

    def test_empty_placement_has_zero_hits(self):
        library = ContentLibrary.zipf(4, 0.7)
        assert echr(Placement(np.zeros((2, 4))), library) == 0.0


class TestStableInterval:
    def test_reference_interval(self):
        lo, hi = stable_echr_interval(_reference_traffic())
        assert lo == pytest.approx(-0.5)
        assert hi == pytest.approx(2.0)

    def test_whole_unit_interval_is_stable_under_the_chain(self):
        # With lam < mu_b < mu_e the open interval always contains [0, 1].
        rng = np.random.default_rng(42)
        for _ in range(50):
            traffic = random_scenario(rng).traffic
            lo, hi = stable_echr_interval(traffic)
            assert lo < 0.0 < 1.0 < hi


class TestAdtCurve:
    def test_endpoints(self):
        traffic = _reference_traffic()
        # h=0: all misses, t = 1/(mu_b - lam); h=1: all hits, t = 1/(mu_e - lam).
        assert adt_curve(0.0, traffic) == pytest.approx(0.5)
        assert adt_curve(1.0, traffic) == pytest.approx(0.25)

    def test_vectorized_matches_scalar(self):
        traffic = _reference_traffic()
        grid = np.linspace(0.0, 1.0, 13)
        values = adt_curve(grid, traffic)
        assert values.shape == grid.shape
        for h, value in zip(grid, values):
            assert value == pytest.approx(float(adt_curve(float(h), traffic)), rel=1e-15)

    def test_weighted_average_across_stations(self):
        traffic = TrafficProfile([4.0, 2.0], [8.0, 8.0], [6.0, 6.0])
        single = TrafficProfile([4.0], [8.0], [6.0])
        other = TrafficProfile([2.0], [8.0], [6.0])
        h = 0.37
        expected = (4.0 * float(adt_curve(h, single)) + 2.0 * float(adt_curve(h, other))) / 6.0
        assert float(adt_curve(h, traffic)) == pytest.approx(expected, rel=1e-15)

    def test_slope_matches_finite_differences(self):
        traffic = _reference_traffic()
        for h in (0.1, 0.35, 0.66, 0.9):
            e = 1e-6
            fd = (float(adt_curve(h + e, traffic)) - float(adt_curve(h - e, traffic))) / (2 * e)
            assert float(adt_slope(h, traffic)) == pytest.approx(fd, rel=1e-6, abs=1e-9)

    def test_curvature_is_positive(self):
        traffic = _reference_traffic()
        assert np.all(adt_curvature(np.linspace(0.0, 1.0, 21), traffic) > 0.0)

    def test_slope_is_increasing(self):
        # Positive curvature everywhere means the slope must increase in h.
        traffic = _reference_traffic()
        slopes = adt_slope(np.linspace(0.0, 1.0, 50), traffic)
        assert np.all(np.diff(slopes) > 0.0)


class TestAdtOfEchr:
    def test_matches_curve(self):
        traffic = _reference_traffic()
        value = adt_of_echr(0.4, 4.0, 8.0, 6.0)
        assert value == pytest.approx(float(adt_curve(0.4, traffic)), rel=1e-15)

    def test_rejects_unstable_rates(self):
        with pytest.raises(ValueError, match="0 < lam < mu_b < mu_e"):
            adt_of_echr(0.5, 6.0, 8.0, 6.0)

    def test_rejects_out_of_range_ratio(self):
        with pytest.raises(ValueError, match=r"\[0, 1\]"):
            adt_of_echr(1.2, 4.0, 8.0, 6.0)


class TestQueueSplit:
    def test_parts_sum_back_exactly(self):
        traffic = TrafficProfile([4.0, 2.0], [8.0, 8.0], [6.0, 6.0])
        split = queue_split(0.371, traffic)
        np.testing.assert_array_equal(split.lambda_e + split.lambda_b, traffic.lam)

    def test_extremes(self):
        traffic = _reference_traffic()
        assert queue_split(0.0, traffic).lambda_e[0] == 0.0
        assert queue_split(1.0, traffic).lambda_b[0] == 0.0


class TestOverallAdt:
    def test_empty_cache_reference_value(self, reference_scenario):
        report = overall_adt(Placement(np.zeros((3, 20))), reference_scenario)
        assert report.h_e == 0.0
        assert report.overall == pytest.approx(0.5)
        np.testing.assert_allclose(report.t_b, 0.5)

    def test_report_breakdown_is_consistent(self, reference_scenario):
        rng = np.random.default_rng(12)
        placement = random_feasible_placement(
            rng, reference_scenario.library, reference_scenario.cluster
        )
        report = overall_adt(placement, reference_scenario)
        assert report.h_e + report.h_b == pytest.approx(1.0)
        recomputed = report.h_e * report.t_e + report.h_b * report.t_b
        np.testing.assert_allclose(recomputed, report.per_station, rtol=1e-15)
        weights = reference_scenario.traffic.weights
        assert report.overall == pytest.approx(float(weights @ report.per_station), rel=1e-15)
        assert report.overall == pytest.approx(
            float(adt_curve(report.h_e, reference_scenario.traffic)), rel=1e-12
        )

    def test_rejects_unequal_sizes(self):
        scenario = Scenario(
            library=ContentLibrary([0.6, 0.4], [1.0, 2.0]),
            cluster=FogCluster([1.0]),
            traffic=TrafficProfile([2.0], [9.0], [5.0]),
        )
        with pytest.raises(ValueError, match="sizes ranging 1..2"):
            overall_adt(Placement(np.zeros((1, 2))), scenario)

    def test_rejects_infeasible_placement(self, reference_scenario):
        matrix = np.zeros((3, 20))
        matrix[0, :5] = 1.0  # over node 1's capacity of 2
        with pytest.raises(ValueError, match="exceeds capacity"):
            overall_adt(matrix, reference_scenario)

    def test_require_equal_sizes_accepts_uniform(self):
        require_equal_sizes(ContentLibrary([0.6, 0.4], [3.0, 3.0]))


class TestGradOverallAdt:
    def test_structure_is_slope_times_popularity(self, reference_scenario):
        matrix = np.zeros((3, 20))
        matrix[2, :4] = 1.0
        gradient = grad_overall_adt(matrix, reference_scenario)
        assert gradient.shape == (60,)
        h = echr(Placement(matrix), reference_scenario.library)
        expected = float(adt_slope(h, reference_scenario.traffic))
        popularity = reference_scenario.library.popularity
        np.testing.assert_allclose(gradient.reshape(3, 20), np.tile(expected * popularity, (3, 1)))

    def test_accepts_vector_matrix_and_placement_forms(self, reference_scenario):
        rng = np.random.default_rng(3)
        placement = random_feasible_placement(
            rng, reference_scenario.library, reference_scenario.cluster
        )
        g1 = grad_overall_adt(placement, reference_scenario)
        g2 = grad_overall_adt(placement.matrix, reference_scenario)
        g3 = grad_overall_adt(placement.vector, reference_scenario)
        np.testing.assert_array_equal(g1, g2)
        np.testing.assert_array_equal(g1, g3)

    def test_matches_finite_differences(self):
        rng = np.random.default_rng(99)
        scenario = make_scenario(capacities=(2.0, 5.0))
        placement = random_feasible_placement(rng, scenario.library, scenario.cluster, margin=0.8)
        vector = placement.vector
        gradient = grad_overall_adt(vector, scenario)
        base = overall_adt(Placement(placement.matrix), scenario).overall
        for j in rng.choice(vector.size, size=8, replace=False):
            e = 1e-7
            bumped = vector.copy()
            bumped[j] += e
            matrix = bumped.reshape(placement.matrix.shape)
            fd = (overall_adt(Placement(matrix), scenario).overall - base) / e
            assert gradient[j] == pytest.approx(fd, rel=1e-5, abs=1e-12)


class TestSecondDerivative:
    def test_positive_on_grid(self, reference_scenario):
        values = d2_adt_dh2(np.linspace(0.0, 1.0, 11), reference_scenario)
        assert np.all(values > 0.0)

    def test_rejects_out_of_range(self, reference_scenario):
        with pytest.raises(ValueError):
            d2_adt_dh2(1.5, reference_scenario)
