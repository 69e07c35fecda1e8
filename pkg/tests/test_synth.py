import numpy as np
import pytest

from kstarmeans.synth import (
    ExperimentCellError,
    SynthSpec,
    bridson_sample,
    cell_seeds,
    generate,
    k_recovery_experiment,
)


def pairwise_min_distance(points):
    d = np.sqrt(((points[:, None, :] - points[None, :, :]) ** 2).sum(-1))
    np.fill_diagonal(d, np.inf)
    return d.min()


class TestBridsonSample:
    def test_single_point(self):
        pts = bridson_sample(1, 3.0, np.random.default_rng(0))
        assert pts.shape == (1, 2)

    def test_two_points_respect_separation(self):
        for seed in range(10):
            pts = bridson_sample(2, 5.0, np.random.default_rng(seed))
            assert pairwise_min_distance(pts) >= 5.0

    def test_fifty_points_all_pairs(self):
        pts = bridson_sample(50, 2.0, np.random.default_rng(3))
        assert pts.shape == (50, 2)
        assert pairwise_min_distance(pts) >= 2.0

    def test_deterministic(self):
        a = bridson_sample(20, 2.5, np.random.default_rng(42))
        b = bridson_sample(20, 2.5, np.random.default_rng(42))
        assert np.array_equal(a, b)

    def test_dense_packing_succeeds_via_doubling(self):
        # Far more points than the initial square can hold.
        pts = bridson_sample(200, 4.0, np.random.default_rng(1))
        assert pts.shape == (200, 2)
        assert pairwise_min_distance(pts) >= 4.0

    def test_invalid_arguments(self):
        with pytest.raises(ValueError):
            bridson_sample(0, 1.0, np.random.default_rng(0))
        with pytest.raises(ValueError):
            bridson_sample(3, 0.0, np.random.default_rng(0))


class TestGenerate:
    def test_single_cluster(self):
        inst = generate(SynthSpec(true_k=1, min_sep=2.0, total_points=10, seed=0))
        assert inst.data.n == 10
        assert inst.data.dim == 2
        assert set(inst.labels.tolist()) == {0}

    def test_equal_class_sizes(self):
        inst = generate(SynthSpec(true_k=4, min_sep=5.0, total_points=1000, seed=1))
        counts = np.bincount(inst.labels)
        assert counts.tolist() == [250, 250, 250, 250]

    def test_remainder_spread_one_per_class(self):
        inst = generate(SynthSpec(true_k=3, min_sep=5.0, total_points=10, seed=2))
        assert np.bincount(inst.labels).tolist() == [4, 3, 3]

    def test_deterministic(self):
        spec = SynthSpec(true_k=5, min_sep=3.0, total_points=200, seed=7)
        a, b = generate(spec), generate(spec)
        assert np.array_equal(a.data.points, b.data.points)
        assert np.array_equal(a.labels, b.labels)
        assert np.array_equal(a.centroids_true, b.centroids_true)

    def test_centroid_separation_invariant(self):
        inst = generate(SynthSpec(true_k=10, min_sep=4.0, total_points=100, seed=3))
        assert pairwise_min_distance(inst.centroids_true) >= 4.0

    def test_class_means_near_their_centroids(self):
        # CLT bound: per-class empirical mean within 4/sqrt(n_class) of its
        # generating center per coordinate, in at least 99% of seeds.
        passes = 0
        for seed in range(100):
            inst = generate(SynthSpec(true_k=4, min_sep=5.0, total_points=1000,
                                      seed=seed))
            ok = True
            for i in range(4):
                cls = inst.data.points[inst.labels == i]
                bound = 4.0 / np.sqrt(len(cls))
                ok &= bool(np.all(np.abs(cls.mean(axis=0) - inst.centroids_true[i])
                                  <= bound))
            passes += ok
        assert passes >= 99

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            SynthSpec(true_k=0, min_sep=1.0)
        with pytest.raises(ValueError):
            SynthSpec(true_k=2, min_sep=-1.0)
        with pytest.raises(ValueError):
            SynthSpec(true_k=5, min_sep=1.0, total_points=3)


class TestKRecovery:
    def test_oracle_algorithm_scores_perfectly(self):
        for true_k in (1, 4, 7):
            report = k_recovery_experiment(
                [true_k], [3.0], reps=2,
                algorithm=lambda data, seed, tk=true_k: tk,
                base_seed=0, total_points=60,
            )
            assert report.accuracy == 1.0
            assert report.mse == 0.0

    def test_grid_shape_and_per_sep_keys(self):
        report = k_recovery_experiment(
            [1, 2], [2.0, 5.0], reps=3,
            algorithm=lambda data, seed: 1,
            base_seed=1, total_points=30,
        )
        assert len(report.per_cell) == 2 * 2 * 3
        assert set(report.per_sep) == {2.0, 5.0}

    def test_biased_algorithm_statistics(self):
        # A constant prediction of 3 misses true_k 2 and 4 by one each.
        report = k_recovery_experiment(
            [2, 4], [4.0], reps=2,
            algorithm=lambda data, seed: 3,
            base_seed=5, total_points=40,
        )
        assert report.accuracy == 0.0
        assert report.mse == pytest.approx(1.0)

    def test_cell_failures_name_the_cell(self):
        def broken(data, seed):
            raise RuntimeError("boom")

        with pytest.raises(ExperimentCellError, match=r"k=2, d_sep=3.0, rep=0"):
            k_recovery_experiment([2], [3.0], reps=1, algorithm=broken,
                                  base_seed=0, total_points=20)

    def test_derived_seeds_are_cell_unique_and_stable(self):
        seen = set()
        for k in (1, 2, 3):
            for sep in (2.0, 5.0):
                for rep in range(3):
                    pair = cell_seeds(123, k, sep, rep)
                    assert pair == cell_seeds(123, k, sep, rep)
                    seen.add(pair)
        assert len(seen) == 18

    def test_deterministic_report(self):
        args = dict(k_range=[1, 3], sep_values=[5.0], reps=2, base_seed=9,
                    total_points=50)
        a = k_recovery_experiment(algorithm=lambda d, s: d.n % 5, **args)
        b = k_recovery_experiment(algorithm=lambda d, s: d.n % 5, **args)
        assert a.per_cell == b.per_cell or all(
            (x.true_k, x.d_sep, x.rep, x.predicted_k, x.exact)
            == (y.true_k, y.d_sep, y.rep, y.predicted_k, y.exact)
            for x, y in zip(a.per_cell, b.per_cell)
        )

    def test_rejects_empty_grid(self):
        with pytest.raises(ValueError):
            k_recovery_experiment([], [2.0], 1, lambda d, s: 1)
        with pytest.raises(ValueError):
            k_recovery_experiment([1], [2.0], 0, lambda d, s: 1)
