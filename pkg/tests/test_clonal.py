import math

import numpy as np
import pytest

from oracles import exhaustive_min_j
from ucsc.clonal import (
    Antibody,
    UcscConfig,
    clone_counts,
    generate_random_antibody,
    hypermutate,
    init_population,
    mutation_scale,
    normalize_affinities,
    run_ucsc,
)
from ucsc.dataset import DataBounds, compute_bounds

UNIT = DataBounds(np.zeros(2), np.ones(2), 1.0)
FLAT = DataBounds(np.full(2, 5.0), np.full(2, 5.0), 0.0)
TWO_BLOBS = np.array([0, 0.1, 0.2, 9.9, 10, 10.1])[:, None]


class TestRandomAntibody:
    def test_within_bounds(self):
        ab = generate_random_antibody(UNIT, 2, np.random.default_rng(0))
        assert ab.genome.shape == (4,)
        assert np.all((0 <= ab.genome) & (ab.genome <= 1))
        assert ab.affinity is None

    def test_degenerate_bounds(self):
        ab = generate_random_antibody(FLAT, 3, np.random.default_rng(0))
        assert ab.genome.tolist() == [5.0] * 6

    def test_recorded_value(self):
        a = generate_random_antibody(UNIT, 2, np.random.default_rng(42))
        b = generate_random_antibody(UNIT, 2, np.random.default_rng(42))
        np.testing.assert_array_equal(a.genome, b.genome)
        np.testing.assert_allclose(
            a.genome, [0.7739560485559633, 0.4388784397520523, 0.8585979199113825, 0.6973680290593639]
        )

    def test_center_major_layout(self):
        bounds = DataBounds(np.array([0.0, 100.0]), np.array([1.0, 101.0]), 101.0)
        ab = generate_random_antibody(bounds, 3, np.random.default_rng(1))
        centers = ab.centers(2)
        assert centers.shape == (3, 2)
        assert np.all(centers[:, 0] <= 1) and np.all(centers[:, 1] >= 100)
        assert np.all(ab.genome[1::2] >= 100)


class TestPopulation:
    def test_size(self):
        pop = init_population(UNIT, UcscConfig(k=2), np.random.default_rng(0))
        assert len(pop) == 10

    def test_degenerate(self):
        pop = init_population(FLAT, UcscConfig(k=2, n=2, l_replace=0), np.random.default_rng(0))
        np.testing.assert_array_equal(pop[0].genome, pop[1].genome)

    def test_reproducible(self):
        cfg = UcscConfig(k=3)
        a = init_population(UNIT, cfg, np.random.default_rng(9))
        b = init_population(UNIT, cfg, np.random.default_rng(9))
        assert all(np.array_equal(x.genome, y.genome) for x, y in zip(a, b))


class TestCloneCounts:
    def test_default_parameters(self):
        counts = clone_counts(10, 5)
        assert counts[:3] == [50, 25, 17]
        assert counts[9] == 5
        assert counts == [50, 25, 17, 13, 10, 8, 7, 6, 6, 5]
        assert sum(counts) == 147

    def test_half_rounds_up(self):
        # 2*5/4 = 2.5
        assert clone_counts(5, 2)[3] == 3

    def test_at_least_one(self):
        assert min(clone_counts(7, 1.0)) >= 1

    def test_invalid(self):
        with pytest.raises(ValueError):
            clone_counts(10, 0)


class TestNormalize:
    def test_min_max(self):
        np.testing.assert_allclose(normalize_affinities([0.2, 0.4, 0.6]), [0, 0.5, 1])

    def test_all_equal(self):
        assert normalize_affinities([0.3, 0.3]).tolist() == [1, 1]

    def test_endpoints(self):
        assert normalize_affinities([0, 1e12]).tolist() == [0, 1]

    def test_empty(self):
        with pytest.raises(ValueError):
            normalize_affinities([])


class TestHypermutate:
    def test_scale(self):
        assert mutation_scale(0.0, 1.0) == 1.0
        assert mutation_scale(1.0, 1.0) == pytest.approx(0.36788, abs=1e-5)

    def test_zero_rho_is_identity(self):
        ab = Antibody(np.array([1.0, 2.0, 3.0]), affinity=0.4, j_value=2.5)
        out = hypermutate(ab, 0.5, 0.0, np.random.default_rng(0))
        np.testing.assert_array_equal(out.genome, ab.genome)
        assert out.affinity is None and out.j_value is None

    def test_step_statistics(self):
        ab = Antibody(np.zeros(20000))
        out = hypermutate(ab, 1.0, 2.0, np.random.default_rng(3))
        assert out.genome.std() == pytest.approx(2 * math.exp(-1), rel=0.03)
        assert abs(out.genome.mean()) < 0.03

    def test_not_clamped(self):
        ab = Antibody(np.zeros(1000))
        out = hypermutate(ab, 0.0, 10.0, np.random.default_rng(0))
        assert np.abs(out.genome).max() > 10


class TestConfig:
    @pytest.mark.parametrize(
        "kwargs",
        [dict(k=0), dict(k=2, n=1), dict(k=2, beta=0), dict(k=2, l_replace=10), dict(k=2, l_replace=-1), dict(k=2, generations=0)],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            UcscConfig(**kwargs)

    def test_defaults(self):
        cfg = UcscConfig(k=3)
        assert (cfg.n, cfg.beta, cfg.l_replace, cfg.generations, cfg.lamarckian) == (10, 5, 4, 30, True)


class TestRun:
    def test_two_blobs(self):
        oracle = exhaustive_min_j(TWO_BLOBS.ravel().tolist(), 2)
        assert oracle == pytest.approx(0.4)
        hits = 0
        for seed in range(100):
            sol, _ = run_ucsc(TWO_BLOBS, UcscConfig(k=2, seed=seed))
            labels = sol.assignment.cluster_of
            separated = len(set(labels[:3])) == 1 and len(set(labels[3:])) == 1 and labels[0] != labels[3]
            hits += separated and sol.j_value == pytest.approx(oracle, abs=1e-9)
        assert hits >= 99

    def test_k_greater_than_n(self):
        with pytest.raises(ValueError, match="exceeds"):
            run_ucsc(TWO_BLOBS, UcscConfig(k=7))

    def test_deterministic(self, iris):
        cfg = UcscConfig(k=3, seed=123, generations=10)
        a, ta = run_ucsc(iris.data, cfg)
        b, tb = run_ucsc(iris.data, cfg)
        np.testing.assert_array_equal(a.centers, b.centers)
        np.testing.assert_array_equal(a.assignment.cluster_of, b.assignment.cluster_of)
        assert a.j_value == b.j_value
        assert ta == tb

    def test_trace_shape(self, iris):
        sol, trace = run_ucsc(iris.data, UcscConfig(k=3, seed=1))
        assert len(trace.best_j) == 30 == sol.iterations
        assert set(trace.clone_total) == {147}
        assert set(trace.population_size) == {10}
        assert all(b <= a for a, b in zip(trace.best_j, trace.best_j[1:]))
        assert sol.j_value == trace.best_j[-1]
        assert 1 <= trace.settled_at() <= 30

    def test_solution_is_consistent(self, iris):
        from ucsc.core import clustering_metric, compute_centroids

        sol, _ = run_ucsc(iris.data, UcscConfig(k=3, seed=4))
        centers, empty = compute_centroids(iris.data, sol.assignment)
        assert not empty.any()
        np.testing.assert_allclose(sol.centers, centers, rtol=1e-12)
        assert clustering_metric(iris.data, sol.assignment, centers) == pytest.approx(sol.j_value, rel=1e-12)

    def test_baldwinian_switch(self, iris):
        lam, _ = run_ucsc(iris.data, UcscConfig(k=3, seed=8, generations=5))
        bal, _ = run_ucsc(iris.data, UcscConfig(k=3, seed=8, generations=5, lamarckian=False))
        assert lam.j_value > 0 and bal.j_value > 0
        assert bal.assignment.counts.min() > 0

    def test_no_replacement(self):
        sol, trace = run_ucsc(TWO_BLOBS, UcscConfig(k=2, l_replace=0, seed=2))
        assert set(trace.population_size) == {10}
        assert sol.j_value == pytest.approx(0.4)

    def test_bounds_from_data(self, iris):
        assert compute_bounds(iris.data).rho == pytest.approx(7.8)
