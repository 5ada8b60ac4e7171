"""Datasets: Gaussian-mixture generation, delimited-file loading and search bounds."""

from __future__ import annotations

import enum
import io
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np


class DatasetError(ValueError):
    """Raised for invalid dataset specs, malformed files and empty data."""


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class DataSet:
    """N points in d-dimensional feature space, stored as an (N, d) float array."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise DatasetError(f"points must be a non-empty (N, d) array, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise DatasetError("points contain NaN or infinite coordinates")
        object.__setattr__(self, "points", _frozen(pts))

    @property
    def n_points(self) -> int:
        return self.points.shape[0]

    @property
    def dims(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class LabeledDataSet:
    data: DataSet
    labels: np.ndarray
    k_true: int
    class_names: tuple[str, ...] = ()

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64)
        if labels.shape != (self.data.n_points,):
            raise DatasetError(
                f"expected {self.data.n_points} labels, got {labels.shape[0] if labels.ndim else 0}"
            )
        if self.k_true < 1 or labels.min() < 0 or labels.max() >= self.k_true:
            raise DatasetError(f"labels must lie in [0, {self.k_true})")
        if len(np.unique(labels)) != self.k_true:
            raise DatasetError("every class index must occur at least once")
        object.__setattr__(self, "labels", _frozen(labels))

    @property
    def class_sizes(self) -> list[int]:
        return np.bincount(self.labels, minlength=self.k_true).tolist()


@dataclass(frozen=True)
class DataBounds:
    lower: np.ndarray
    upper: np.ndarray
    rho: float


def compute_bounds(data: DataSet | np.ndarray) -> DataBounds:
    """Per-feature limits plus the global range (max of all features minus min of all)."""
    pts = data.points if isinstance(data, DataSet) else np.asarray(data, dtype=float)
    if pts.size == 0:
        raise DatasetError("cannot compute bounds of an empty dataset")
    lower = pts.min(axis=0)
    upper = pts.max(axis=0)
    return DataBounds(_frozen(lower), _frozen(upper), float(upper.max() - lower.min()))


# --- synthetic data --------------------------------------------------------


@dataclass(frozen=True)
class GaussianComponent:
    mean: tuple[float, ...]
    variance: tuple[float, ...]  # diagonal of the covariance matrix
    count: int


@dataclass(frozen=True)
class GaussianMixtureSpec:
    components: tuple[GaussianComponent, ...]

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise DatasetError("mixture needs at least one component")
        d = len(comps[0].mean)
        for i, c in enumerate(comps):
            if len(c.mean) != d or len(c.variance) != d:
                raise DatasetError(f"component {i}: mean/variance must both have dimension {d}")
            if d < 1:
                raise DatasetError(f"component {i}: empty mean")
            if any(not v > 0 for v in c.variance):
                raise DatasetError(f"component {i}: variances must be > 0, got {c.variance}")
            if int(c.count) != c.count or c.count < 1:
                raise DatasetError(f"component {i}: count must be a positive integer, got {c.count}")
        object.__setattr__(self, "components", comps)

    @property
    def dims(self) -> int:
        return len(self.components[0].mean)

    @classmethod
    def from_dict(cls, spec: dict) -> "GaussianMixtureSpec":
        try:
            comps = tuple(
                GaussianComponent(
                    tuple(float(v) for v in c["mean"]),
                    tuple(float(v) for v in c["variance"]),
                    int(c["count"]),
                )
                for c in spec["components"]
            )
        except (KeyError, TypeError) as exc:
            raise DatasetError(f"malformed mixture spec: {exc!r}") from exc
        return cls(comps)


def _isotropic(means, variance, count) -> GaussianMixtureSpec:
    return GaussianMixtureSpec(
        tuple(GaussianComponent(tuple(m), tuple(variance), count) for m in means)
    )


DATASET1 = _isotropic([(0.1, 0.1), (0.35, 0.1)], (0.11, 0.1), 100)
DATASET2 = _isotropic([(a, b) for a in (0.1, 0.5, 0.9) for b in (0.1, 0.5, 0.9)], (0.08, 0.08), 25)
DATASET3 = _isotropic([(1, 1, 1), (2, 2.5, 2.5), (2, 3, 3)], (0.3, 0.3, 0.3), 50)

BUILTIN_MIXTURES = {"dataset1": DATASET1, "dataset2": DATASET2, "dataset3": DATASET3}
SPREAD_READINGS = ("variance", "std")


def builtin_mixture(name: str, spread: str = "variance") -> GaussianMixtureSpec:
    """A built-in mixture; ``spread="std"`` treats the listed diagonal as standard deviations."""
    try:
        spec = BUILTIN_MIXTURES[name]
    except KeyError:
        raise DatasetError(f"unknown dataset {name!r}; choose from {sorted(BUILTIN_MIXTURES)}") from None
    if spread == "variance":
        return spec
    if spread != "std":
        raise DatasetError(f"spread must be one of {SPREAD_READINGS}, got {spread!r}")
    return GaussianMixtureSpec(
        tuple(
            GaussianComponent(c.mean, tuple(v * v for v in c.variance), c.count) for c in spec.components
        )
    )


def generate_gaussian_mixture(spec: GaussianMixtureSpec, seed: int) -> LabeledDataSet:
    """Draw every component's points in order; the label is the component index.

    Covariances are diagonal, so each coordinate is an independent normal with
    the component's variance on that axis.
    """
    rng = np.random.default_rng(seed)
    blocks, labels = [], []
    for idx, comp in enumerate(spec.components):
        std = np.sqrt(np.asarray(comp.variance))
        blocks.append(np.asarray(comp.mean) + std * rng.standard_normal((comp.count, len(std))))
        labels.append(np.full(comp.count, idx))
    return LabeledDataSet(
        DataSet(np.vstack(blocks)),
        np.concatenate(labels),
        len(spec.components),
        tuple(f"c{i}" for i in range(len(spec.components))),
    )


# --- delimited files -------------------------------------------------------


class MissingValuePolicy(str, enum.Enum):
    REJECT = "reject"
    DROP = "drop"
    IMPUTE = "impute"  # per-feature median of the observed values


@dataclass(frozen=True)
class ColumnSchema:
    """Which columns hold features and which holds the class label.

    ``features=None`` means every column except the label column. Negative
    indices count from the end of the row.
    """

    label: int = -1
    features: tuple[int, ...] | None = None
    missing_marker: str = "?"
    missing: MissingValuePolicy = MissingValuePolicy.IMPUTE
    delimiter: str | None = None  # None: comma if present, otherwise whitespace

    def with_policy(self, policy: MissingValuePolicy | str) -> "ColumnSchema":
        return ColumnSchema(
            self.label, self.features, self.missing_marker, MissingValuePolicy(policy), self.delimiter
        )


IRIS_SCHEMA = ColumnSchema(label=4, features=(0, 1, 2, 3))
# column 0 is the sample code number; class column holds 2 (benign) or 4 (malignant)
BREAST_CANCER_SCHEMA = ColumnSchema(label=10, features=tuple(range(1, 10)))

BUILTIN_SCHEMAS = {"iris": IRIS_SCHEMA, "breast-cancer": BREAST_CANCER_SCHEMA}


def _split(line: str, delimiter: str | None) -> list[str]:
    if delimiter is None:
        delimiter = "," if "," in line else None
    if delimiter is None:
        return line.split()
    return [cell.strip() for cell in line.split(delimiter)]


def load_delimited(path: str | Path, schema: ColumnSchema = ColumnSchema()) -> LabeledDataSet:
    """Parse a comma- or whitespace-separated file with one pattern per row.

    Blank lines and lines starting with ``#`` are skipped. Label strings are
    mapped to indices in order of first appearance. Errors name the 1-based
    line number and 0-based column.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise DatasetError(f"cannot read {path}: {exc.strerror or exc}") from exc

    rows: list[list[float]] = []
    raw_labels: list[str] = []
    width = None
    for lineno, line in enumerate(io.StringIO(text), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        cells = _split(line, schema.delimiter)
        if width is None:
            width = len(cells)
        elif len(cells) != width:
            raise DatasetError(f"{path}: line {lineno}: expected {width} columns, found {len(cells)}")
        try:
            label_cell = cells[schema.label]
        except IndexError:
            raise DatasetError(f"{path}: line {lineno}: no label column {schema.label}") from None
        features = schema.features
        if features is None:
            label_idx = schema.label % width
            features = tuple(i for i in range(width) if i != label_idx)
        row = []
        for col in features:
            try:
                cell = cells[col]
            except IndexError:
                raise DatasetError(f"{path}: line {lineno}: no feature column {col}") from None
            if cell == schema.missing_marker:
                if schema.missing is MissingValuePolicy.REJECT:
                    raise DatasetError(f"{path}: line {lineno}, column {col}: missing value")
                row.append(np.nan)
                continue
            try:
                value = float(cell)
            except ValueError:
                raise DatasetError(
                    f"{path}: line {lineno}, column {col}: non-numeric value {cell!r}"
                ) from None
            if not np.isfinite(value):
                raise DatasetError(f"{path}: line {lineno}, column {col}: non-finite value {cell!r}")
            row.append(value)
        rows.append(row)
        raw_labels.append(label_cell)

    if not rows:
        raise DatasetError(f"{path}: no data rows")

    points = np.array(rows, dtype=float)
    missing = np.isnan(points)
    if missing.any():
        if schema.missing is MissingValuePolicy.DROP:
            keep = ~missing.any(axis=1)
            points = points[keep]
            raw_labels = [lab for lab, k in zip(raw_labels, keep) if k]
            if len(points) == 0:
                raise DatasetError(f"{path}: every row has a missing value")
        else:
            medians = np.nanmedian(points, axis=0)
            if np.isnan(medians).any():
                raise DatasetError(f"{path}: a feature column has no observed values")
            rr, cc = np.nonzero(missing)
            points[rr, cc] = medians[cc]

    names: dict[str, int] = {}
    labels = [names.setdefault(lab, len(names)) for lab in raw_labels]
    return LabeledDataSet(DataSet(points), np.array(labels), len(names), tuple(names))


def write_delimited(dataset: LabeledDataSet, path: str | Path) -> None:
    """Write comma-separated features with a trailing integer label column."""
    lines = [
        ",".join([*(repr(float(v)) for v in row), str(int(lab))])
        for row, lab in zip(dataset.data.points, dataset.labels)
    ]
    Path(path).write_text("\n".join(lines) + "\n")


def parse_columns(text: str) -> tuple[int, ...]:
    """Parse a column list such as ``"1-9"`` or ``"0,2,3"``."""
    cols: list[int] = []
    for part in filter(None, (p.strip() for p in text.split(","))):
        m = re.fullmatch(r"(\d+)-(\d+)", part)
        if m:
            cols.extend(range(int(m[1]), int(m[2]) + 1))
        else:
            cols.append(int(part))
    return tuple(cols)


def as_points(data: DataSet | LabeledDataSet | np.ndarray | Sequence) -> np.ndarray:
    if isinstance(data, LabeledDataSet):
        return data.data.points
    if isinstance(data, DataSet):
        return data.points
    return DataSet(np.asarray(data, dtype=float)).points
