import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from invariants import CHECKS


@pytest.mark.parametrize("name", list(CHECKS))
@settings(max_examples=120, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(seed=st.integers(0, 2**32 - 1))
def test_invariant(name, seed):
    CHECKS[name](np.random.default_rng(seed))


@settings(max_examples=100, deadline=None)
@given(perm=st.permutations([0, 1, 2]), seed=st.integers(0, 2**32 - 1))
def test_permutation_equivariance(perm, seed):
    from ucsc.core import assign_points, compute_centroids, clustering_metric

    rng = np.random.default_rng(seed)
    pts = rng.normal(size=(25, 2))
    centers = rng.normal(size=(3, 2))
    a = assign_points(pts, centers)
    b = assign_points(pts, centers[list(perm)])
    np.testing.assert_array_equal(np.asarray(perm)[b.cluster_of], a.cluster_of)
    assert clustering_metric(pts, b, centers[list(perm)]) == pytest.approx(clustering_metric(pts, a, centers), rel=1e-12)
