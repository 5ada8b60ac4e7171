"""Unsupervised Clonal Selection Classification (UCSC).

Antibodies encode K cluster centers as one flat real vector of length d*K,
center-major (the first d numbers are center 1, the next d center 2, ...).
Affinity is 1/J, or zero when a cluster is empty.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .core import AFFINITY_CAP, Assignment, ClusteringSolution, evaluate_batch
from .dataset import DataBounds, DataSet, as_points, compute_bounds


@dataclass(frozen=True)
class UcscConfig:
    k: int
    n: int = 10
    beta: float = 5.0
    l_replace: int = 4
    generations: int = 30
    seed: int = 0
    lamarckian: bool = True

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k: must be >= 1, got {self.k}")
        if self.n < 2:
            raise ValueError(f"n: population size must be >= 2, got {self.n}")
        if not self.beta > 0:
            raise ValueError(f"beta: clonal factor must be > 0, got {self.beta}")
        if not 0 <= self.l_replace < self.n:
            raise ValueError(f"l_replace: must satisfy 0 <= L < n={self.n}, got {self.l_replace}")
        if self.generations < 1:
            raise ValueError(f"generations: must be >= 1, got {self.generations}")


@dataclass
class Antibody:
    genome: np.ndarray  # flat, length d*K
    affinity: float | None = None
    j_value: float | None = None

    def centers(self, dims: int) -> np.ndarray:
        return self.genome.reshape(-1, dims)


@dataclass
class GenerationTrace:
    best_j: list[float] = field(default_factory=list)
    mean_j: list[float] = field(default_factory=list)
    best_affinity: list[float] = field(default_factory=list)
    empty_count: list[int] = field(default_factory=list)
    clone_total: list[int] = field(default_factory=list)
    population_size: list[int] = field(default_factory=list)

    def settled_at(self, rtol: float = 0.0) -> int:
        """1-based generation at which the best J first reached its final value."""
        final = self.best_j[-1]
        for g, value in enumerate(self.best_j, start=1):
            if value <= final * (1 + rtol):
                return g
        return len(self.best_j)


def generate_random_antibody(bounds: DataBounds, k: int, rng: np.random.Generator) -> Antibody:
    """Uniform draw inside the per-feature data limits for every center coordinate."""
    lower = np.asarray(bounds.lower)
    span = np.asarray(bounds.upper) - lower
    return Antibody((lower + span * rng.random((k, len(lower)))).ravel())


def init_population(bounds: DataBounds, config: UcscConfig, rng: np.random.Generator) -> list[Antibody]:
    return [generate_random_antibody(bounds, config.k, rng) for _ in range(config.n)]


def clone_counts(n: int, beta: float) -> list[int]:
    """Clones per rank l = 1..n: round(beta*n/l), halves rounded away from zero."""
    if n < 1 or not beta > 0:
        raise ValueError(f"need n >= 1 and beta > 0, got n={n}, beta={beta}")
    return [int(math.floor(beta * n / rank + 0.5)) for rank in range(1, n + 1)]


def normalize_affinities(raw: Sequence[float]) -> np.ndarray:
    """Min-max scale to [0, 1]; a collection with no spread maps to all ones."""
    a = np.asarray(raw, dtype=float)
    if a.size == 0:
        raise ValueError("cannot normalize an empty collection")
    if (a < 0).any():
        raise ValueError("affinities must be non-negative")
    lo, hi = a.min(), a.max()
    if hi == lo:
        return np.ones_like(a)
    return (a - lo) / (hi - lo)


def mutation_scale(normalized_aff, rho: float):
    return rho * np.exp(-np.asarray(normalized_aff, dtype=float))


def hypermutate(antibody: Antibody, normalized_aff: float, rho: float, rng: np.random.Generator) -> Antibody:
    """Gaussian perturbation of every gene with step rho*exp(-aff); no clamping."""
    alpha = mutation_scale(normalized_aff, rho)
    genome = antibody.genome + alpha * rng.standard_normal(antibody.genome.shape)
    return Antibody(genome)


class _Pool:
    """Population held as stacked arrays.

    ``genome`` is what gets cloned and mutated. ``origin`` is the raw center set
    whose nearest-center partition produced the cached score; it differs from
    ``genome`` only under Lamarckian write-back and lets the final answer be
    re-evaluated to exactly the partition that was scored.
    """

    def __init__(self, genome, origin, j, aff, empty):
        self.genome, self.origin, self.j, self.aff, self.empty = genome, origin, j, aff, empty

    @classmethod
    def evaluate(cls, points, raw, lamarckian):
        updated, _, j, aff, empty = evaluate_batch(points, raw, AFFINITY_CAP)
        return cls(updated if lamarckian else raw, raw, j, aff, empty)

    def take(self, idx):
        return _Pool(self.genome[idx], self.origin[idx], self.j[idx], self.aff[idx], self.empty[idx])

    def concat(self, other):
        return _Pool(*(np.concatenate([a, b]) for a, b in zip(self._fields(), other._fields())))

    def _fields(self):
        return self.genome, self.origin, self.j, self.aff, self.empty

    def __len__(self):
        return len(self.aff)

    def sorted(self):
        return self.take(np.argsort(-self.aff, kind="stable"))

    def best_j(self):
        return float(self.j[0]) if self.aff[0] > 0 else math.inf


def run_ucsc(
    data: DataSet | np.ndarray,
    config: UcscConfig,
    observer: Callable[[dict], None] | None = None,
) -> tuple[ClusteringSolution, GenerationTrace]:
    """Run the clonal-selection loop for ``config.generations`` generations.

    Each generation: clone the sorted population by rank, mutate each clone
    with its parent's normalized affinity, pool parents and mutants, keep the
    n best, then swap the L worst for fresh random antibodies. Scores are cached
    because evaluation is deterministic. ``observer`` receives a dict snapshot
    after every generation.
    """
    points = as_points(data)
    n_pts, d = points.shape
    k = config.k
    if k > n_pts:
        raise ValueError(f"k={k} exceeds the number of points N={n_pts}")

    rng = np.random.default_rng(config.seed)
    bounds = compute_bounds(points)
    counts = clone_counts(config.n, config.beta)
    parent_of = np.repeat(np.arange(config.n), counts)

    def fresh(m):
        raw = np.stack([generate_random_antibody(bounds, k, rng).genome for _ in range(m)])
        return _Pool.evaluate(points, raw.reshape(m, k, d), config.lamarckian)

    pop = fresh(config.n).sorted()
    trace = GenerationTrace()
    for gen in range(config.generations):
        alpha = mutation_scale(normalize_affinities(pop.aff), bounds.rho)[parent_of]
        clones = pop.genome[parent_of]
        mutated = clones + alpha[:, None, None] * rng.standard_normal(clones.shape)
        mutants = _Pool.evaluate(points, mutated, config.lamarckian)

        pool = pop.concat(mutants)
        order = np.argsort(-pool.aff, kind="stable")
        pop = pool.take(order[: config.n])
        selected_aff = pop.aff.copy()

        empties = int(mutants.empty.sum())
        if config.l_replace:
            newcomers = fresh(config.l_replace)
            empties += int(newcomers.empty.sum())
            pop = pop.take(np.arange(config.n - config.l_replace)).concat(newcomers).sorted()

        trace.best_j.append(pop.best_j())
        trace.mean_j.append(float(pop.j.mean()))
        trace.best_affinity.append(float(pop.aff[0]))
        trace.empty_count.append(empties)
        trace.clone_total.append(len(mutants))
        trace.population_size.append(len(pop))
        if observer is not None:
            observer(
                {
                    "generation": gen + 1,
                    "pool_affinity": pool.aff.copy(),
                    "selected_affinity": selected_aff,
                    "population_affinity": pop.aff.copy(),
                    "population_j": pop.j.copy(),
                    "population_empty": pop.empty.copy(),
                }
            )

    updated, labels, j, _, _ = evaluate_batch(points, pop.origin[:1], AFFINITY_CAP)
    solution = ClusteringSolution(
        centers=updated[0],
        assignment=Assignment.from_labels(labels[0], k),
        j_value=float(j[0]),
        seed=config.seed,
        iterations=config.generations,
        trace=trace,
    )
    return solution, trace
