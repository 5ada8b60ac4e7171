"""Nearest-centroid geometry shared by UCSC and K-means.

The clustering metric J is the sum of plain (not squared) Euclidean distances
from every point to the centroid of its cluster.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from .dataset import as_points

AFFINITY_CAP = 1e12


@dataclass(frozen=True)
class Assignment:
    cluster_of: np.ndarray  # (N,) cluster index per point
    counts: np.ndarray  # (K,) points per cluster

    @classmethod
    def from_labels(cls, cluster_of, k: int) -> "Assignment":
        cluster_of = np.asarray(cluster_of, dtype=np.int64)
        return cls(cluster_of, np.bincount(cluster_of, minlength=k))

    @property
    def k(self) -> int:
        return len(self.counts)

    @property
    def empty_mask(self) -> np.ndarray:
        return self.counts == 0


@dataclass(frozen=True)
class EvaluatedSolution:
    centroids: np.ndarray  # (K, d), updated means; empty clusters keep their input center
    assignment: Assignment
    j_value: float
    affinity: float
    has_empty_cluster: bool


@dataclass
class ClusteringSolution:
    centers: np.ndarray
    assignment: Assignment
    j_value: float
    seed: int | None
    iterations: int  # generations for UCSC, Lloyd iterations for K-means
    trace: Any = None


def _as_centers(centers, dims: int) -> np.ndarray:
    c = np.asarray(centers, dtype=float)
    if c.ndim == 1 and dims == 1:
        c = c[:, None]
    if c.ndim != 2 or c.shape[0] < 1:
        raise ValueError(f"centroids must be a (K, d) array, got shape {c.shape}")
    if c.shape[1] != dims:
        raise ValueError(f"dimension mismatch: data has d={dims}, centroids have d={c.shape[1]}")
    return c


def _distances(points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    """Euclidean distances of shape (..., N, K) for centers of shape (..., K, d)."""
    diff = points[..., :, None, :] - centers[..., None, :, :]
    return np.sqrt(np.einsum("...ij,...ij->...i", diff, diff))


def assign_points(data, centroids) -> Assignment:
    """Nearest-centroid assignment; equidistant points go to the lowest index."""
    pts = as_points(data)
    c = _as_centers(centroids, pts.shape[1])
    return Assignment.from_labels(np.argmin(_distances(pts, c), axis=1), len(c))


def compute_centroids(data, assignment: Assignment, k: int | None = None):
    """Cluster means plus an emptiness mask.

    Rows for empty clusters are NaN; callers must replace them before use.
    """
    pts = as_points(data)
    k = assignment.k if k is None else k
    if len(assignment.cluster_of) != len(pts):
        raise ValueError("assignment does not cover the data")
    counts = np.bincount(assignment.cluster_of, minlength=k)
    sums = np.zeros((k, pts.shape[1]))
    np.add.at(sums, assignment.cluster_of, pts)
    empty = counts == 0
    with np.errstate(invalid="ignore", divide="ignore"):
        centers = sums / counts[:, None]
    centers[empty] = np.nan
    return centers, empty


def clustering_metric(data, assignment: Assignment, centroids) -> float:
    pts = as_points(data)
    c = _as_centers(centroids, pts.shape[1])
    diff = pts - c[assignment.cluster_of]
    return float(np.sqrt(np.einsum("ij,ij->i", diff, diff)).sum())


def affinity_from_j(j_value: float, has_empty_cluster: bool, cap: float = AFFINITY_CAP) -> float:
    if j_value < 0:
        raise ValueError(f"J must be non-negative, got {j_value}")
    if has_empty_cluster:
        return 0.0
    if j_value == 0:
        return cap
    return min(1.0 / j_value, cap)


def evaluate_batch(points: np.ndarray, centers: np.ndarray, cap: float = AFFINITY_CAP):
    """Score a stack of candidate center sets at once.

    ``centers`` has shape (B, K, d). Each candidate's points are assigned to
    their nearest encoded center, non-empty clusters are moved to their means,
    and J is measured against the moved centers. Returns
    ``(updated_centers, labels, j_values, affinities, empty_flags)``.
    """
    b, k, d = centers.shape
    labels = np.argmin(_distances(points, centers), axis=-1)  # (B, N)
    flat = (labels + k * np.arange(b)[:, None]).ravel()
    counts = np.bincount(flat, minlength=b * k).reshape(b, k)
    sums = np.stack(
        [np.bincount(flat, weights=np.tile(points[:, i], b), minlength=b * k) for i in range(d)],
        axis=-1,
    ).reshape(b, k, d)
    nonempty = counts > 0
    updated = np.where(
        nonempty[..., None], sums / np.maximum(counts, 1)[..., None], centers
    )
    own = updated.reshape(b * k, d)[flat]  # (B*N, d)
    diff = np.tile(points, (b, 1)) - own
    j_values = np.sqrt(np.einsum("ij,ij->i", diff, diff)).reshape(b, -1).sum(axis=1)
    empty = ~nonempty.all(axis=1)
    with np.errstate(divide="ignore"):
        aff = np.where(j_values > 0, 1.0 / j_values, cap)
    aff = np.where(empty, 0.0, np.minimum(aff, cap))
    return updated, labels, j_values, aff, empty


def evaluate_antibody(data, centers, cap: float = AFFINITY_CAP) -> EvaluatedSolution:
    """Assign to the encoded centers, move non-empty clusters to their means, score J."""
    pts = as_points(data)
    c = _as_centers(centers, pts.shape[1])
    updated, labels, j_values, aff, empty = evaluate_batch(pts, c[None], cap)
    return EvaluatedSolution(
        updated[0],
        Assignment.from_labels(labels[0], len(c)),
        float(j_values[0]),
        float(aff[0]),
        bool(empty[0]),
    )
