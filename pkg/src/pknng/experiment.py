"""Benchmark orchestration: (dataset x noise x embedding x method) grids
with repeated seeded realizations, accuracy aggregation, incremental
persistence, and the MNIST subset protocol.

Every realization's seed derives from (base_seed, cell identity,
realization index) by a stable hash, so cells never perturb each other and
parallel execution cannot change any result.
"""

from __future__ import annotations

import csv
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import numpy as np

from .cluster import hierarchical, mst_cluster, pam, spectral, accuracy
from .connect import ConnectorConfig
from .datasets import (
    CLASS_COUNTS,
    DatasetSpec,
    generate_dataset,
    load_mnist_idx,
    merged_constants,
    sample_digit_subsets,
)
from .geodesic import apsp_dijkstra
from .graph import min_k_connected_graph
from .manifold import pknng_metric
from .pairwise import euclidean_matrix
from .rng import derive_seed, make_rng

METRICS = ("euclidean", "pknng", "min_k")
ALGORITHMS = ("pam", "hc", "mst", "spectral")


@dataclass(frozen=True)
class MethodSpec:
    """A dissimilarity choice plus a clustering algorithm."""

    metric: str = "pknng"
    algorithm: str = "pam"
    scheme: str = "min_span"
    penalty: str = "exponential"
    knn_k: int = 5
    linkage: str = "average"
    sigma_factor: float = 1.0

    def __post_init__(self):
        if self.metric not in METRICS:
            raise ValueError(f"metric must be one of {METRICS}, got {self.metric!r}")
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"algorithm must be one of {ALGORITHMS}, got {self.algorithm!r}")

    def label(self) -> str:
        if self.metric == "pknng":
            parts = [self.metric, self.scheme, self.penalty, f"k{self.knn_k}", self.algorithm]
        else:
            parts = [self.metric, self.algorithm]
        if self.algorithm == "hc":
            parts.append(self.linkage)
        return "-".join(parts)


def compute_dissimilarity(coords, method: MethodSpec) -> np.ndarray:
    if method.metric == "euclidean":
        return euclidean_matrix(coords)
    if method.metric == "pknng":
        config = ConnectorConfig(scheme=method.scheme, penalty=method.penalty)
        return pknng_metric(coords, k=method.knn_k, config=config)
    g, _ = min_k_connected_graph(coords)
    return apsp_dijkstra(g)


def cluster_with(D, method: MethodSpec, k_clusters: int, seed: int):
    if method.algorithm == "pam":
        return pam(D, k_clusters)
    if method.algorithm == "hc":
        return hierarchical(D, k_clusters, method.linkage)
    if method.algorithm == "mst":
        return mst_cluster(D, k_clusters)
    return spectral(D, k_clusters, method.sigma_factor, rng=make_rng(seed, stream=2))


@dataclass(frozen=True)
class ExperimentSpec:
    """The full grid: dataset specs x methods, shared realization count,
    base seed, and geometry-constant overrides."""

    datasets: tuple[DatasetSpec, ...]
    methods: tuple[MethodSpec, ...]
    realizations: int = 20
    base_seed: int = 0
    constants: dict | None = None
    k_clusters: int | None = None  # None: the dataset family's class count

    def __post_init__(self):
        if self.realizations < 1:
            raise ValueError("realizations must be at least 1")
        object.__setattr__(self, "datasets", tuple(self.datasets))
        object.__setattr__(self, "methods", tuple(self.methods))

    def to_config(self) -> dict:
        """JSON-ready dict, with the geometry constants fully resolved for
        provenance."""
        return {
            "realizations": self.realizations,
            "base_seed": self.base_seed,
            "k_clusters": self.k_clusters,
            "constants": merged_constants(self.constants),
            "datasets": [asdict(d) for d in self.datasets],
            "methods": [asdict(m) for m in self.methods],
        }

    @classmethod
    def from_config(cls, config: dict) -> "ExperimentSpec":
        datasets = tuple(DatasetSpec(**d) for d in config["datasets"])
        methods = tuple(MethodSpec(**m) for m in config.get("methods", [{}]))
        return cls(
            datasets=datasets,
            methods=methods,
            realizations=config.get("realizations", 20),
            base_seed=config.get("base_seed", 0),
            constants=config.get("constants"),
            k_clusters=config.get("k_clusters"),
        )


def cell_identity(dataset: DatasetSpec, method: MethodSpec, k_clusters: int) -> dict:
    ident = asdict(dataset)
    ident.pop("seed")
    ident.update(asdict(method))
    ident["k_clusters"] = k_clusters
    return ident


def cell_id(dataset: DatasetSpec, method: MethodSpec, k_clusters: int) -> str:
    ident = cell_identity(dataset, method, k_clusters)
    digest = f"{derive_seed(json.dumps(ident, sort_keys=True)):016x}"[:12]
    return f"{dataset.family}_{dataset.noise}_{dataset.embedding}_{method.label()}_{digest}"


def run_cell(dataset: DatasetSpec, method: MethodSpec, realizations: int,
             base_seed: int = 0, constants: dict | None = None,
             k_clusters: int | None = None) -> dict:
    """All realizations of one grid cell.

    Returns a JSON-ready dict with one record per realization (seed,
    accuracy, error). Failed realizations are recorded and excluded from
    the aggregates, never silently dropped.
    """
    if k_clusters is None:
        k_clusters = CLASS_COUNTS[dataset.family]
    ident = cell_identity(dataset, method, k_clusters)
    key = json.dumps(ident, sort_keys=True)
    started = time.perf_counter()
    records = []
    for r in range(realizations):
        seed = derive_seed(base_seed, key, r)
        record = {"realization": r, "seed": seed, "accuracy": None, "error": None}
        try:
            ps = generate_dataset(replace(dataset, seed=seed), constants)
            D = compute_dissimilarity(ps.points, method)
            assignment = cluster_with(D, method, k_clusters, seed)
            record["accuracy"] = accuracy(assignment, ps.labels)
        except Exception as exc:  # noqa: BLE001 - reported per realization
            record["error"] = f"{type(exc).__name__}: {exc}"
        records.append(record)

    accs = [rec["accuracy"] for rec in records if rec["accuracy"] is not None]
    return {
        "cell_id": cell_id(dataset, method, k_clusters),
        **ident,
        "realizations": realizations,
        "base_seed": base_seed,
        "records": records,
        "n_failures": realizations - len(accs),
        "mean_accuracy": float(np.mean(accs)) if accs else None,
        "std_accuracy": float(np.std(accs, ddof=1)) if len(accs) > 1 else (0.0 if accs else None),
        "wall_time_s": time.perf_counter() - started,
    }


def _run_cell_task(args):
    dataset, method, realizations, base_seed, constants, k_clusters = args
    return run_cell(dataset, method, realizations, base_seed, constants, k_clusters)


_IDENTITY_COLUMNS = [
    "cell_id", "family", "noise", "embedding", "n_per_cluster", "embed_noise_sigma",
    "metric", "scheme", "penalty", "knn_k", "algorithm", "linkage", "sigma_factor",
    "k_clusters",
]


def _write_atomic_json(payload: dict, path: Path) -> None:
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps(payload, sort_keys=True), encoding="utf-8")
    os.replace(tmp, path)


def run_grid(spec: ExperimentSpec, out_dir, jobs: int = 1) -> list[dict]:
    """Run every (dataset, method) cell; write per-cell JSON incrementally
    so an interrupted grid resumes by skipping completed cells, then emit
    realizations.csv (one row per cell x realization) and summary.csv.

    Output is independent of `jobs` and of completion order.
    """
    out_dir = Path(out_dir)
    cells_dir = out_dir / "cells"
    cells_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "config.json").write_text(
        json.dumps(spec.to_config(), sort_keys=True, indent=2), encoding="utf-8")

    tasks = {}
    for dataset in spec.datasets:
        for method in spec.methods:
            k = spec.k_clusters or CLASS_COUNTS[dataset.family]
            cid = cell_id(dataset, method, k)
            tasks[cid] = (dataset, method, spec.realizations, spec.base_seed,
                          spec.constants, k)

    results = {}
    pending = []
    for cid, args in tasks.items():
        path = cells_dir / f"{cid}.json"
        if path.exists():
            results[cid] = json.loads(path.read_text(encoding="utf-8"))
        else:
            pending.append((cid, args))

    if pending:
        if jobs > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                for (cid, _), result in zip(pending, pool.map(_run_cell_task,
                                                              [a for _, a in pending])):
                    _write_atomic_json(result, cells_dir / f"{cid}.json")
                    results[cid] = result
        else:
            for cid, args in pending:
                result = _run_cell_task(args)
                _write_atomic_json(result, cells_dir / f"{cid}.json")
                results[cid] = result

    ordered = [results[cid] for cid in sorted(results)]
    _write_grid_csvs(ordered, out_dir)
    return ordered


def _format(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_grid_csvs(ordered: list[dict], out_dir: Path) -> None:
    with open(out_dir / "realizations.csv", "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(_IDENTITY_COLUMNS + ["realization", "seed", "accuracy", "error"])
        for cell in ordered:
            prefix = [_format(cell[c]) for c in _IDENTITY_COLUMNS]
            for rec in cell["records"]:
                writer.writerow(prefix + [rec["realization"], rec["seed"],
                                          _format(rec["accuracy"]), _format(rec["error"])])
    # wall_time_s stays in the per-cell JSON only: the CSVs must come out
    # bit-identical across reruns and parallelism levels
    with open(out_dir / "summary.csv", "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(_IDENTITY_COLUMNS
                        + ["realizations", "n_failures", "mean_accuracy", "std_accuracy"])
        for cell in ordered:
            writer.writerow(
                [_format(cell[c]) for c in _IDENTITY_COLUMNS]
                + [cell["realizations"], cell["n_failures"], _format(cell["mean_accuracy"]),
                   _format(cell["std_accuracy"])])


def run_mnist(images_path, labels_path, digits, per_class: int, repeats: int,
              methods: list[MethodSpec], base_seed: int = 0) -> list[dict]:
    """The digit-subset protocol: draw `repeats` non-overlapping subsets
    with per_class points per digit, cluster each subset into len(digits)
    clusters with every method, and aggregate accuracy per method.

    Dissimilarity matrices are cached per (subset, metric) so methods
    sharing a metric are scored on identical inputs.
    """
    digits = list(digits)
    full = load_mnist_idx(images_path, labels_path)
    subset_seed = derive_seed(base_seed, "mnist-subsets", tuple(digits), per_class, repeats)
    subsets = sample_digit_subsets(full, digits, per_class, repeats, rng=make_rng(subset_seed))

    cache: dict[tuple[int, str], np.ndarray] = {}

    def dissimilarity(idx: int, method: MethodSpec) -> np.ndarray:
        if method.metric == "pknng":
            key = f"pknng-{method.scheme}-{method.penalty}-k{method.knn_k}"
        else:
            key = method.metric
        if (idx, key) not in cache:
            cache[(idx, key)] = compute_dissimilarity(subsets[idx].points, method)
        return cache[(idx, key)]

    rows = []
    for method in methods:
        accs, seeds = [], []
        for idx, subset in enumerate(subsets):
            seed = derive_seed(base_seed, "mnist-run", method.label(), idx)
            assignment = cluster_with(dissimilarity(idx, method), method, len(digits), seed)
            accs.append(accuracy(assignment, subset.labels))
            seeds.append(seed)
        rows.append({
            "method": method.label(),
            "digits": "-".join(str(d) for d in digits),
            "per_class": per_class,
            "repeats": repeats,
            "accuracies": accs,
            "seeds": seeds,
            "mean_accuracy": float(np.mean(accs)),
            "std_accuracy": float(np.std(accs, ddof=1)) if len(accs) > 1 else 0.0,
        })
    return rows


def write_mnist_csv(rows: list[dict], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["method", "digits", "per_class", "repeats",
                         "mean_accuracy", "std_accuracy", "accuracies"])
        for row in rows:
            writer.writerow([row["method"], row["digits"], row["per_class"], row["repeats"],
                             repr(row["mean_accuracy"]), repr(row["std_accuracy"]),
                             ";".join(repr(a) for a in row["accuracies"])])
