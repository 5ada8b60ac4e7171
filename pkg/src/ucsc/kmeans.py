"""Lloyd's K-means baseline, reporting the sum-of-distances metric at termination."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import Assignment, ClusteringSolution, assign_points, clustering_metric, compute_centroids
from .dataset import DataSet, as_points, compute_bounds

INIT_METHODS = ("forgy", "uniform")
_MAX_RESEEDS = 100


@dataclass(frozen=True)
class KMeansConfig:
    k: int
    max_iterations: int = 1000
    seed: int = 0
    init: str = "forgy"

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k: must be >= 1, got {self.k}")
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations: must be >= 1, got {self.max_iterations}")
        if self.init not in INIT_METHODS:
            raise ValueError(f"init: must be one of {INIT_METHODS}, got {self.init!r}")


def _initial_centers(points, config, rng):
    if config.init == "forgy":
        return points[rng.choice(len(points), size=config.k, replace=False)].copy()
    b = compute_bounds(points)
    return b.lower + (b.upper - b.lower) * rng.random((config.k, points.shape[1]))


def squared_error(points, assignment: Assignment, centers) -> float:
    return float(((points - centers[assignment.cluster_of]) ** 2).sum())


def run_kmeans(
    data: DataSet | np.ndarray,
    config: KMeansConfig,
    on_iteration: Callable[[int, float, bool], None] | None = None,
) -> ClusteringSolution:
    """Alternate assignment and mean updates until the partition stops changing.

    An iteration is one assignment followed by one update. A cluster left
    empty by the assignment is re-seeded at a uniformly chosen data point and
    the points are reassigned. At the iteration cap the last partition and its
    means are returned.
    ``on_iteration(i, sse, reseeded)`` is called after each update with the
    squared error of that iteration's assignment against the updated centers.
    """
    points = as_points(data)
    if config.k > len(points):
        raise ValueError(f"k={config.k} exceeds the number of points N={len(points)}")
    rng = np.random.default_rng(config.seed)
    centers = _initial_centers(points, config, rng)

    previous = None
    iterations = 0
    for iterations in range(1, config.max_iterations + 1):
        assignment = assign_points(points, centers)
        reseeded = False
        for _ in range(_MAX_RESEEDS + 1):
            empty = assignment.empty_mask
            if not empty.any():
                break
            reseeded = True
            for i in np.flatnonzero(empty):
                centers[i] = points[rng.integers(len(points))]
            assignment = assign_points(points, centers)
        else:
            raise ValueError("could not fill every cluster; too few distinct points for k")
        if previous is not None and np.array_equal(assignment.cluster_of, previous.cluster_of):
            break
        centers, _ = compute_centroids(points, assignment, config.k)
        previous = assignment
        if on_iteration is not None:
            on_iteration(iterations, squared_error(points, assignment, centers), reseeded)

    centers, _ = compute_centroids(points, previous, config.k)
    return ClusteringSolution(
        centers=centers,
        assignment=previous,
        j_value=clustering_metric(points, previous, centers),
        seed=config.seed,
        iterations=iterations,
    )
