import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ucfda.covariance import (
    compute_population_stats,
    oas_intensity,
    pooled_covariance,
    sample_covariance,
    shrink,
    shrinkage_covariance,
)
from ucfda.data import LabeledDataset
from ucfda.errors import ClassTooSmall, DegenerateDenominator, EmptyDataset, ZeroVariance
from ucfda.scatter import within_scatter

from conftest import random_dataset


def ds(x, y):
    return LabeledDataset.from_arrays(np.asarray(x, float), y)


class TestPopulationStats:
    def test_two_point_class(self):
        stats = compute_population_stats(ds([[0, 0], [2, 2]], [0, 0]))
        c = stats.per_class[0]
        np.testing.assert_array_equal(c.mean, [1, 1])
        np.testing.assert_array_equal(c.cov, [[2, 2], [2, 2]])

    def test_overall_mean_weighted(self):
        x = [[0, 0], [0, 0], [2, 0], [2, 0]]
        x = np.array(x, float) + np.array([[0, 1], [0, -1], [0, 1], [0, -1]])
        stats = compute_population_stats(ds(x, [0, 0, 1, 1]))
        np.testing.assert_allclose(stats.overall_mean, [1, 0])

    def test_unequal_sizes_weighting(self, rng):
        data = random_dataset(rng, 3, 4, [5, 20, 50])
        stats = compute_population_stats(data)
        assert stats.total_n == 75 == sum(stats.counts)
        np.testing.assert_allclose(stats.overall_mean, data.features.mean(axis=0), atol=1e-12)

    def test_iris_means_match_column_averages(self, benchmark_datasets):
        iris = benchmark_datasets["Iris"]
        stats = compute_population_stats(iris)
        for c in stats.per_class:
            rows = iris.features[iris.labels == c.class_id]
            oracle = np.array([sum(col) / len(col) for col in rows.T])
            np.testing.assert_allclose(c.mean, oracle, atol=1e-12)
            assert c.n == 50

    def test_cov_matches_numpy(self, rng):
        x = rng.normal(size=(30, 5))
        np.testing.assert_allclose(sample_covariance(x), np.cov(x, rowvar=False), atol=1e-13)

    def test_class_too_small(self):
        with pytest.raises(ClassTooSmall) as info:
            compute_population_stats(ds([[0.0], [1.0], [2.0]], [0, 0, 1]))
        assert info.value.class_id == 1

    def test_empty(self):
        empty = LabeledDataset(np.zeros((0, 2)), np.zeros(0, int), ("a", "b"), ("c",))
        with pytest.raises(EmptyDataset):
            compute_population_stats(empty)

    def test_classes_in_ascending_id_order(self):
        stats = compute_population_stats(ds([[1.0], [2.0], [5.0], [7.0]], ["b", "b", "a", "a"]))
        assert stats.class_ids == (0, 1)

    def test_permutation_invariance(self, rng):
        data = random_dataset(rng, 3, 4, [10, 12, 15])
        perm = rng.permutation(data.n_samples)
        a = compute_population_stats(data)
        b = compute_population_stats(data.subset(perm))
        for ca, cb in zip(a.per_class, b.per_class):
            np.testing.assert_allclose(ca.mean, cb.mean, atol=1e-12)
            np.testing.assert_allclose(ca.cov, cb.cov, atol=1e-12)
        np.testing.assert_allclose(a.overall_mean, b.overall_mean, atol=1e-12)


class TestPooled:
    def test_identical_covariances(self):
        base = np.array([[0.0, 0.0], [1.0, 2.0], [3.0, 1.0]])
        data = ds(np.vstack([base, base + 10]), [0] * 3 + [1] * 3)
        stats = compute_population_stats(data)
        np.testing.assert_allclose(pooled_covariance(stats), stats.per_class[0].cov, atol=1e-12)

    def test_single_class(self, rng):
        data = random_dataset(rng, 1, 3, [10])
        stats = compute_population_stats(data)
        np.testing.assert_allclose(pooled_covariance(stats), stats.per_class[0].cov)

    def test_matches_within_scatter(self, rng):
        data = random_dataset(rng, 3, 5, [8, 13, 21])
        stats = compute_population_stats(data)
        w = within_scatter(data, stats)
        np.testing.assert_allclose(pooled_covariance(stats) * (stats.total_n - 3), w, rtol=1e-10, atol=1e-12)

    def test_degenerate_denominator(self):
        from ucfda.covariance import ClassStats, PopulationStats

        stats = PopulationStats((ClassStats(0, 1, np.zeros(1), np.zeros((1, 1))),), np.zeros(1), 1)
        with pytest.raises(DegenerateDenominator):
            pooled_covariance(stats)


def oas_reference(x):
    """sklearn's OAS implementation, as an independent oracle."""
    from sklearn.covariance import OAS

    est = OAS(assume_centered=False).fit(x)
    return est.shrinkage_


class TestShrinkage:
    def test_large_sample_output_close_to_sample_covariance(self, rng):
        # i.i.d. standard normal: the truth equals the spherical target, so
        # OAS shrinks fully, yet the output still matches S closely
        x = rng.normal(size=(10000, 2))
        np.testing.assert_allclose(shrinkage_covariance(x), sample_covariance(x), atol=0.05)

    def test_large_sample_intensity_near_zero_when_anisotropic(self, rng):
        x = rng.normal(size=(10000, 2)) * [1.0, 3.0]
        assert oas_intensity(sample_covariance(x), 10000) < 0.05

    def test_spherical_truth_shrinks_fully(self, rng):
        x = rng.normal(size=(10000, 2))
        assert oas_intensity(sample_covariance(x), 10000) == pytest.approx(oas_reference(x), abs=1e-12)

    def test_small_sample(self, rng):
        x = rng.normal(size=(2, 10))
        s = sample_covariance(x)
        rho = oas_intensity(s, 2)
        assert rho > 0.5
        out = shrinkage_covariance(x)
        target = np.trace(s) / 10 * np.eye(10)
        assert np.linalg.norm(out - target) < np.linalg.norm(out - s)

    @pytest.mark.parametrize("rho", [0.0, 0.3, 1.0])
    def test_scaled_identity_fixed_point(self, rho):
        np.testing.assert_allclose(shrink(2.5 * np.eye(3), rho), 2.5 * np.eye(3))

    def test_zero_variance(self):
        with pytest.raises(ZeroVariance):
            shrinkage_covariance(np.ones((5, 3)))

    def test_pinned_intensity(self, rng):
        x = rng.normal(size=(20, 4))
        np.testing.assert_allclose(shrinkage_covariance(x, 0.0), sample_covariance(x))

    @pytest.mark.parametrize("n,p", [(10, 3), (30, 8), (5, 20), (200, 5)])
    def test_intensity_close_to_reference(self, rng, n, p):
        # sklearn uses the biased covariance and a slightly different closed
        # form, so only coarse agreement is expected
        pytest.importorskip("sklearn")
        x = rng.normal(size=(n, p)) * rng.uniform(0.5, 3, size=p)
        ours = oas_intensity(sample_covariance(x), n)
        assert 0 <= ours <= 1
        assert abs(ours - oas_reference(x)) < 0.15

    @settings(max_examples=40, deadline=None)
    @given(st.integers(2, 40), st.integers(1, 8), st.integers(0, 2**32 - 1))
    def test_conditioning_never_worse(self, n, p, seed):
        x = np.random.default_rng(seed).normal(size=(n, p))
        s = sample_covariance(x)
        out = shrinkage_covariance(x)
        np.testing.assert_allclose(out, out.T)
        ev_s = np.linalg.eigvalsh(s)
        ev_o = np.linalg.eigvalsh(out)
        assert ev_o.min() >= -1e-12
        if ev_s.min() > 1e-12:
            assert ev_o.max() / ev_o.min() <= ev_s.max() / ev_s.min() + 1e-12
        else:
            assert ev_o.min() > 0 or oas_intensity(s, n) == 0
