"""Unsupervised Clonal Selection Classification with a K-means baseline."""

from .clonal import (
    Antibody,
    GenerationTrace,
    UcscConfig,
    clone_counts,
    generate_random_antibody,
    hypermutate,
    init_population,
    normalize_affinities,
    run_ucsc,
)
from .core import (
    Assignment,
    ClusteringSolution,
    EvaluatedSolution,
    affinity_from_j,
    assign_points,
    clustering_metric,
    compute_centroids,
    evaluate_antibody,
)
from .dataset import (
    DataBounds,
    DataSet,
    DatasetError,
    GaussianMixtureSpec,
    LabeledDataSet,
    MissingValuePolicy,
    compute_bounds,
    generate_gaussian_mixture,
    load_delimited,
)
from .evaluation import RunStats, classification_accuracy, multi_run, render_results
from .kmeans import KMeansConfig, run_kmeans

__version__ = "0.1.0"
