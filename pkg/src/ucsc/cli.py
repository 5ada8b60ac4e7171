"""Command line: ``ucsc generate``, ``ucsc run`` and ``ucsc reproduce``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from pathlib import Path

import numpy as np

from .clonal import UcscConfig
from .dataset import (
    BUILTIN_MIXTURES,
    BUILTIN_SCHEMAS,
    SPREAD_READINGS,
    ColumnSchema,
    DatasetError,
    GaussianMixtureSpec,
    LabeledDataSet,
    MissingValuePolicy,
    builtin_mixture,
    generate_gaussian_mixture,
    load_delimited,
    parse_columns,
    write_delimited,
)
from .evaluation import KMeansRunner, UcscRunner, multi_run, render_results, write_run_records
from .kmeans import INIT_METHODS, KMeansConfig


class ConfigError(ValueError):
    pass


# Published best accuracy (%), best J and percent of runs reaching it.
PUBLISHED_RESULTS = {
    "Dataset 1": {"UCSC": (88.0, 25.141, 100), "K-means": (86.0, 25.166, 100)},
    "Dataset 2": {"UCSC": (97.78, 21.597, 100), "K-means": (97.33, 21.906, 40)},
    "Dataset 3": {"UCSC": (91.33, 70.628, 100), "K-means": (91.33, 70.653, 75)},
    "Iris": {"UCSC": (90.0, 97.101, 100), "K-means": (89.33, 97.205, 80)},
    "Breast Cancer": {"UCSC": (96.11, 3048.2, 100), "K-means": (95.7, 3051.3, 100)},
}
REAL_FILES = {"Iris": ("iris.data", "iris"), "Breast Cancer": ("breast-cancer-wisconsin.data", "breast-cancer")}
SYNTHETIC = {"Dataset 1": "dataset1", "Dataset 2": "dataset2", "Dataset 3": "dataset3"}


def _add_algorithm_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--algo", choices=("ucsc", "kmeans", "both"), default="both")
    p.add_argument("--k", type=int, help="number of clusters (default: number of classes)")
    p.add_argument("--runs", type=int, default=100)
    p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument("--generations", type=int, default=30)
    p.add_argument("--pop-size", type=int, default=10)
    p.add_argument("--beta", type=float, default=5.0)
    p.add_argument("--replace", type=int, default=4, help="fresh antibodies per generation (L)")
    p.add_argument("--lamarckian", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--max-iters", type=int, default=1000)
    p.add_argument("--init", choices=INIT_METHODS, default="forgy")
    p.add_argument("--j-tolerance", type=float, default=1e-4)
    p.add_argument("--workers", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ucsc", description="Clonal-selection clustering benchmarks")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a synthetic Gaussian-mixture dataset")
    g.add_argument("spec", nargs="?", help="dataset1, dataset2 or dataset3")
    g.add_argument("--mixture", help="inline JSON or path to a JSON mixture spec")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument(
        "--spread", choices=SPREAD_READINGS, default="variance",
        help="read the built-in mixtures' diagonal as variances or standard deviations",
    )
    g.add_argument("--out", required=True)

    r = sub.add_parser("run", help="repeated runs on one dataset")
    r.add_argument("--config", help="key = value file; command-line flags take precedence")
    r.add_argument("--dataset", help="dataset1|dataset2|dataset3 or a delimited file")
    r.add_argument("--data-seed", type=int, help="seed for generated datasets (default: --seed)")
    r.add_argument(
        "--spread", choices=SPREAD_READINGS, default="variance",
        help="read the built-in mixtures' diagonal as variances or standard deviations",
    )
    r.add_argument("--schema", choices=("generic", *BUILTIN_SCHEMAS), default="generic")
    r.add_argument("--features", help="feature columns, e.g. 1-9 (default: all but the label)")
    r.add_argument("--label-col", type=int, default=-1)
    r.add_argument("--missing-marker", default="?")
    r.add_argument("--missing", choices=tuple(m.value for m in MissingValuePolicy), default="impute")
    r.add_argument("--out", default="results")
    _add_algorithm_flags(r)

    rp = sub.add_parser("reproduce", help="both algorithms on all five benchmark datasets")
    rp.add_argument("--data-dir", required=True, help="directory holding iris.data and breast-cancer-wisconsin.data")
    rp.add_argument("--out", default="reproduce")
    rp.add_argument("--missing", choices=tuple(m.value for m in MissingValuePolicy), default="impute")
    rp.add_argument(
        "--spread", choices=SPREAD_READINGS, default="variance",
        help="read the built-in mixtures' diagonal as variances or standard deviations",
    )
    _add_algorithm_flags(rp)
    return parser


def read_config_file(path: str | Path, parser: argparse.ArgumentParser) -> dict[str, str]:
    """Parse ``key = value`` lines into argparse destinations."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc.strerror or exc}") from exc
    known = {a.dest for a in parser._actions}
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"config line {lineno}: expected key = value")
        dest = key.strip().replace("-", "_")
        if dest not in known or dest in ("config", "help"):
            raise ConfigError(f"config line {lineno}: unknown key {key.strip()!r}")
        values[dest] = value.strip()
    return values


def _coerce_config(values: dict[str, str], parser: argparse.ArgumentParser) -> dict[str, object]:
    actions = {a.dest: a for a in parser._actions}
    out = {}
    for dest, raw in values.items():
        act = actions[dest]
        if isinstance(act, argparse.BooleanOptionalAction):
            if raw.lower() not in ("true", "false", "yes", "no", "1", "0"):
                raise ConfigError(f"{dest}: expected a boolean, got {raw!r}")
            out[dest] = raw.lower() in ("true", "yes", "1")
            continue
        try:
            val = act.type(raw) if act.type else raw
        except ValueError:
            raise ConfigError(f"{dest}: invalid value {raw!r}") from None
        if act.choices is not None and val not in act.choices:
            raise ConfigError(f"{dest}: {raw!r} is not one of {tuple(act.choices)}")
        out[dest] = val
    return out


def _algorithm_configs(args, k: int):
    if args.runs < 1:
        raise ConfigError(f"runs: must be >= 1, got {args.runs}")
    if args.j_tolerance < 0:
        raise ConfigError(f"j_tolerance: must be >= 0, got {args.j_tolerance}")
    try:
        ucsc = UcscConfig(
            k=k,
            n=args.pop_size,
            beta=args.beta,
            l_replace=args.replace,
            generations=args.generations,
            seed=args.seed,
            lamarckian=args.lamarckian,
        )
        km = KMeansConfig(k=k, max_iterations=args.max_iters, seed=args.seed, init=args.init)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    runners = []
    if args.algo in ("ucsc", "both"):
        runners.append(UcscRunner(ucsc))
    if args.algo in ("kmeans", "both"):
        runners.append(KMeansRunner(km))
    return runners


def _effective_config(args, **extra) -> dict[str, object]:
    keys = (
        "algo runs seed generations pop_size beta replace lamarckian max_iters init j_tolerance"
    ).split()
    cfg = dict(extra)
    cfg.update({key: getattr(args, key) for key in keys})
    return cfg


def _load_dataset(args) -> tuple[LabeledDataSet, dict[str, object]]:
    if args.dataset is None:
        raise ConfigError("dataset: required (--dataset or 'dataset' in the config file)")
    if args.dataset in BUILTIN_MIXTURES:
        data_seed = args.seed if args.data_seed is None else args.data_seed
        data = generate_gaussian_mixture(builtin_mixture(args.dataset, args.spread), data_seed)
        return data, {"dataset": args.dataset, "data_seed": data_seed, "spread": args.spread}
    if args.schema != "generic":
        schema = BUILTIN_SCHEMAS[args.schema]
    else:
        try:
            features = parse_columns(args.features) if args.features else None
        except ValueError:
            raise ConfigError(f"features: cannot parse column list {args.features!r}") from None
        schema = ColumnSchema(label=args.label_col, features=features, missing_marker=args.missing_marker)
    schema = schema.with_policy(MissingValuePolicy(args.missing))
    path = Path(args.dataset)
    if not path.is_file():
        raise DatasetError(f"dataset file not found: {path}")
    data = load_delimited(path, schema)
    return data, {
        "dataset": str(path),
        "schema": args.schema,
        "features": args.features,
        "label_col": args.label_col,
        "missing_marker": schema.missing_marker,
        "missing": args.missing,
    }


def _progress(label: str, started: float) -> None:
    print(f"done {label} ({time.perf_counter() - started:.1f}s)", file=sys.stderr)


def cmd_generate(args) -> int:
    if (args.spec is None) == (args.mixture is None):
        raise ConfigError("generate: give exactly one of a spec name or --mixture")
    if args.spec is not None:
        if args.spec not in BUILTIN_MIXTURES:
            raise ConfigError(f"spec: unknown dataset {args.spec!r}; choose from {sorted(BUILTIN_MIXTURES)}")
        spec = builtin_mixture(args.spec, args.spread)
    else:
        src = Path(args.mixture)
        try:
            raw = json.loads(src.read_text() if src.is_file() else args.mixture)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"mixture: invalid JSON ({exc.msg})") from None
        spec = GaussianMixtureSpec.from_dict(raw)
    data = generate_gaussian_mixture(spec, args.seed)
    write_delimited(data, args.out)
    print(f"N={data.data.n_points} d={data.data.dims} K_true={data.k_true} -> {args.out}")
    return 0


def cmd_run(args) -> int:
    data, data_cfg = _load_dataset(args)
    k = args.k if args.k is not None else data.k_true
    runners = _algorithm_configs(args, k)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    name = Path(str(data_cfg["dataset"])).stem if args.dataset not in BUILTIN_MIXTURES else args.dataset
    stats = {}
    for runner in runners:
        started = time.perf_counter()
        stats[name, runner.name] = multi_run(runner, data, args.runs, args.seed, args.j_tolerance, args.workers)
        _progress(f"{name}/{runner.name}", started)

    config = _effective_config(args, **data_cfg, k=k)
    text = render_results(stats, out / "report.csv", config)
    write_run_records(stats, out / "runs.csv")
    (out / "report.txt").write_text(text)
    sys.stdout.write(text)
    return 0


def _comparison(stats) -> tuple[str, str]:
    header = [
        "dataset", "algorithm", "best_j", "published_j", "delta_j", "best_j_percent", "published_percent",
        "best_accuracy", "published_accuracy", "delta_accuracy", "note",
    ]
    rows = []
    for ds, algo in sorted(stats):
        s = stats[ds, algo]
        p_acc, p_j, p_pct = PUBLISHED_RESULTS[ds][algo]
        acc = 100 * s.best_accuracy
        note = "regenerated data: property comparison only" if ds in SYNTHETIC else ""
        rows.append([
            ds, algo, f"{s.best_j:.3f}", f"{p_j:g}", f"{s.best_j - p_j:+.3f}", f"{s.best_j_percent:.0f}",
            f"{p_pct}", f"{acc:.2f}", f"{p_acc:.2f}", f"{acc - p_acc:+.2f}", note,
        ])
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows([header, *rows])
    widths = [max(len(str(c)) for c in col) for col in zip(header, *rows)]
    text = "\n".join("  ".join(str(c).ljust(w) for c, w in zip(r, widths)).rstrip() for r in [header, *rows])
    return buf.getvalue(), text + "\n"


def cmd_reproduce(args) -> int:
    data_dir = Path(args.data_dir)
    missing = [str(data_dir / fname) for fname, _ in REAL_FILES.values() if not (data_dir / fname).is_file()]
    if missing:
        raise DatasetError("missing dataset files: " + ", ".join(missing))
    # configs are validated before any computation starts
    _algorithm_configs(args, 1)

    datasets: dict[str, LabeledDataSet] = {}
    for i, (label, key) in enumerate(SYNTHETIC.items()):
        seed = int(np.random.SeedSequence([args.seed, 1_000_000 + i]).generate_state(1)[0])
        datasets[label] = generate_gaussian_mixture(builtin_mixture(key, args.spread), seed)
    policy = MissingValuePolicy(args.missing)
    for label, (fname, schema) in REAL_FILES.items():
        datasets[label] = load_delimited(data_dir / fname, BUILTIN_SCHEMAS[schema].with_policy(policy))

    stats = {}
    for label, data in datasets.items():
        for runner in _algorithm_configs(args, data.k_true):
            started = time.perf_counter()
            stats[label, runner.name] = multi_run(
                runner, data, args.runs, args.seed, args.j_tolerance, args.workers
            )
            _progress(f"{label}/{runner.name}", started)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    config = _effective_config(args, data_dir=str(data_dir), missing=args.missing, spread=args.spread)
    text = render_results(stats, out / "report.csv", config)
    write_run_records(stats, out / "runs.csv")
    cmp_csv, cmp_text = _comparison(stats)
    (out / "comparison.csv").write_text(cmp_csv)
    full = text + "\nComparison with published results\n" + cmp_text
    (out / "report.txt").write_text(full)
    sys.stdout.write(full)
    return 0


COMMANDS = {"generate": cmd_generate, "run": cmd_run, "reproduce": cmd_reproduce}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    args = parser.parse_args(argv)
    try:
        if getattr(args, "config", None):
            sub = parser._subparsers._group_actions[0].choices[args.command]
            sub.set_defaults(**_coerce_config(read_config_file(args.config, sub), sub))
            args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"ucsc: configuration error: {exc}", file=sys.stderr)
        return 2
    except (DatasetError, OSError, ValueError) as exc:
        print(f"ucsc: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
