import numpy as np
import pytest

from ucsc.kmeans import KMeansConfig, run_kmeans


def test_k_distinct_points():
    pts = np.array([[0.0, 0], [3, 1], [-2, 5]])
    sol = run_kmeans(pts, KMeansConfig(k=3, seed=0))
    assert sol.iterations <= 2
    assert sol.j_value == 0
    assert sorted(sol.assignment.cluster_of.tolist()) == [0, 1, 2]


def test_k_greater_than_n():
    with pytest.raises(ValueError, match="exceeds"):
        run_kmeans(np.zeros((2, 1)), KMeansConfig(k=3))


@pytest.mark.parametrize("kwargs", [dict(k=0), dict(k=2, max_iterations=0), dict(k=2, init="kmeans++")])
def test_invalid_config(kwargs):
    with pytest.raises(ValueError):
        KMeansConfig(**kwargs)


def test_iteration_cap():
    rng = np.random.default_rng(0)
    pts = rng.normal(size=(300, 2))
    sol = run_kmeans(pts, KMeansConfig(k=8, max_iterations=1, seed=3))
    assert sol.iterations == 1
    assert sol.assignment.counts.min() > 0


def test_uniform_init_reseeds_empty_clusters():
    rng = np.random.default_rng(1)
    pts = np.vstack([rng.normal(0, 0.01, (20, 2)), rng.normal(10, 0.01, (20, 2))])
    reseeds = []
    for seed in range(20):
        sol = run_kmeans(
            pts, KMeansConfig(k=4, init="uniform", seed=seed), on_iteration=lambda i, e, r: reseeds.append(r)
        )
        assert sol.assignment.counts.min() > 0
    assert any(reseeds)


def test_deterministic(iris):
    cfg = KMeansConfig(k=3, seed=77)
    a, b = run_kmeans(iris.data, cfg), run_kmeans(iris.data, cfg)
    assert a.j_value == b.j_value
    np.testing.assert_array_equal(a.assignment.cluster_of, b.assignment.cluster_of)


def test_reports_plain_distance_metric(iris):
    from ucsc.core import clustering_metric

    sol = run_kmeans(iris.data, KMeansConfig(k=3, seed=5))
    assert sol.j_value == pytest.approx(clustering_metric(iris.data, sol.assignment, sol.centers))
    np.testing.assert_allclose(
        sol.centers, [iris.data.points[sol.assignment.cluster_of == i].mean(axis=0) for i in range(3)]
    )


def test_squared_error_monotone(iris):
    for seed in range(20):
        history = []
        run_kmeans(iris.data, KMeansConfig(k=3, seed=seed), on_iteration=lambda i, e, r: history.append((e, r)))
        for (prev, _), (cur, reseeded) in zip(history, history[1:]):
            if not reseeded:
                assert cur <= prev * (1 + 1e-12)


def test_iris_best_j(iris):
    js = [run_kmeans(iris.data, KMeansConfig(k=3, seed=s)).j_value for s in range(30)]
    assert min(js) == pytest.approx(97.205, abs=1e-3)
