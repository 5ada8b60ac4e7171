"""Accuracy under optimal label matching, repeated-run statistics and reports."""

from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Mapping

import numpy as np
from scipy.optimize import linear_sum_assignment

from .clonal import UcscConfig, run_ucsc
from .core import Assignment, ClusteringSolution
from .dataset import LabeledDataSet
from .kmeans import KMeansConfig, run_kmeans

REPORT_COLUMNS = ("dataset", "algorithm", "best_j", "best_j_percent", "best_accuracy", "runs", "master_seed")
RUN_COLUMNS = ("dataset", "algorithm", "run_index", "seed", "j_value", "accuracy", "iterations")


def contingency_table(predicted, truth, k: int) -> np.ndarray:
    """counts[i, c] = number of points in predicted cluster i with true class c."""
    pred = np.asarray(predicted.cluster_of if isinstance(predicted, Assignment) else predicted)
    truth = np.asarray(truth)
    if pred.shape != truth.shape:
        raise ValueError(f"length mismatch: {pred.size} predictions vs {truth.size} labels")
    table = np.zeros((k, k), dtype=np.int64)
    np.add.at(table, (pred, truth), 1)
    return table


def classification_accuracy(predicted, truth, k: int) -> float:
    """Fraction correct under the best one-to-one cluster-to-class matching."""
    table = contingency_table(predicted, truth, k)
    rows, cols = linear_sum_assignment(table, maximize=True)
    return float(table[rows, cols].sum() / table.sum())


def derive_seed(master_seed: int, run_index: int) -> int:
    """Per-run seed; a run can be replayed alone from (master_seed, run_index)."""
    return int(np.random.SeedSequence([master_seed, run_index]).generate_state(1)[0])


@dataclass(frozen=True)
class UcscRunner:
    config: UcscConfig
    name: str = "UCSC"

    def __call__(self, points, seed: int) -> ClusteringSolution:
        return run_ucsc(points, replace(self.config, seed=seed))[0]


@dataclass(frozen=True)
class KMeansRunner:
    config: KMeansConfig
    name: str = "K-means"

    def __call__(self, points, seed: int) -> ClusteringSolution:
        return run_kmeans(points, replace(self.config, seed=seed))


@dataclass(frozen=True)
class RunRecord:
    run_index: int
    seed: int
    j_value: float
    accuracy: float
    iterations: int


@dataclass
class RunStats:
    records: list[RunRecord]
    j_tolerance: float = 1e-4
    master_seed: int | None = None
    solutions: list[ClusteringSolution] | None = field(default=None, repr=False)

    @property
    def runs(self) -> int:
        return len(self.records)

    @property
    def j_values(self) -> np.ndarray:
        return np.array([r.j_value for r in self.records])

    @property
    def best_j(self) -> float:
        return float(self.j_values.min())

    @property
    def best_j_percent(self) -> float:
        hits = self.j_values <= self.best_j * (1 + self.j_tolerance)
        return 100.0 * hits.sum() / self.runs

    @property
    def best_accuracy(self) -> float:
        return max(r.accuracy for r in self.records)

    @property
    def accuracy_at_best_j(self) -> float:
        return self.records[int(np.argmin(self.j_values))].accuracy


def _one_run(algorithm, points, truth, k, master_seed, index):
    seed = derive_seed(master_seed, index)
    sol = algorithm(points, seed)
    acc = classification_accuracy(sol.assignment, truth, k)
    return RunRecord(index, seed, sol.j_value, acc, sol.iterations), sol


def multi_run(
    algorithm: Callable[[np.ndarray, int], ClusteringSolution],
    data: LabeledDataSet,
    runs: int,
    master_seed: int,
    j_tolerance: float = 1e-4,
    workers: int = 1,
    keep_solutions: bool = False,
) -> RunStats:
    """Run ``algorithm(points, seed)`` ``runs`` times with derived per-run seeds.

    With ``workers > 1`` runs go to a process pool; ``algorithm`` must then be
    picklable (the runner classes above are).
    """
    if runs < 1:
        raise ValueError(f"runs must be >= 1, got {runs}")
    args = (algorithm, data.data.points, data.labels, data.k_true, master_seed)
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(_one_run, *zip(*[(*args, i) for i in range(runs)])))
    else:
        results = [_one_run(*args, i) for i in range(runs)]
    results.sort(key=lambda rs: rs[0].run_index)
    return RunStats(
        [r for r, _ in results],
        j_tolerance,
        master_seed,
        [s for _, s in results] if keep_solutions else None,
    )


def _table(header, rows) -> str:
    widths = [max(len(str(c)) for c in col) for col in zip(header, *rows)]
    fmt = lambda row: "  ".join(str(c).ljust(w) for c, w in zip(row, widths)).rstrip()
    lines = [fmt(header), fmt(["-" * w for w in widths])] + [fmt(r) for r in rows]
    return "\n".join(lines)


def render_results(
    stats: Mapping[tuple[str, str], RunStats],
    csv_path: str | Path | None = None,
    config: Mapping[str, object] | None = None,
) -> str:
    """Summary CSV (one row per dataset x algorithm) plus an aligned text table.

    Rows are ordered by (dataset, algorithm). ``config`` is embedded as
    ``# key=value`` lines ahead of the CSV header and the text tables.
    """
    keys = sorted(stats)
    preamble = [f"# {k}={v}" for k, v in (config or {}).items()]

    buf = io.StringIO()
    for line in preamble:
        buf.write(line + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(REPORT_COLUMNS)
    for ds, algo in keys:
        s = stats[ds, algo]
        writer.writerow(
            [ds, algo, f"{s.best_j:.6f}", f"{s.best_j_percent:.1f}", f"{100 * s.best_accuracy:.2f}", s.runs, s.master_seed]
        )
    if csv_path is not None:
        Path(csv_path).write_text(buf.getvalue())

    acc_rows = [
        [ds, algo, f"{100 * stats[ds, algo].best_accuracy:.2f}%", f"{100 * stats[ds, algo].accuracy_at_best_j:.2f}%"]
        for ds, algo in keys
    ]
    j_rows = [
        [ds, algo, f"{stats[ds, algo].best_j:.3f}", f"{stats[ds, algo].best_j_percent:.0f}%", stats[ds, algo].runs]
        for ds, algo in keys
    ]
    parts = preamble + [
        "Classification accuracy",
        _table(["dataset", "algorithm", "best accuracy", "accuracy at best J"], acc_rows),
        "",
        "Clustering metric J",
        _table(["dataset", "algorithm", "best J", "percent", "runs"], j_rows),
    ]
    return "\n".join(parts) + "\n"


def write_run_records(stats: Mapping[tuple[str, str], RunStats], path: str | Path) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RUN_COLUMNS)
    for ds, algo in sorted(stats):
        for r in stats[ds, algo].records:
            writer.writerow([ds, algo, r.run_index, r.seed, repr(r.j_value), f"{r.accuracy:.6f}", r.iterations])
    Path(path).write_text(buf.getvalue())
