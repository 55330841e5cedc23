"""Command-line surface: generate datasets, compute dissimilarities,
cluster, run benchmark grids, and run the MNIST digit protocol.

Every command echoes its fully resolved configuration to stdout before
doing work, so any published number traces back to explicit settings.
Usage errors exit 2; runtime failures exit 1.
"""

from __future__ import annotations

import functools
import json
import sys

import click
import numpy as np

from . import io
from .cluster import hierarchical, mst_cluster, pam, spectral
from .connect import ConnectorConfig, connect_graph
from .datasets import DatasetSpec, generate_dataset
from .experiment import (
    ExperimentSpec,
    MethodSpec,
    run_grid,
    run_mnist,
    write_mnist_csv,
)
from .geodesic import apsp_dijkstra
from .graph import build_knn_graph, min_k_connected_graph, prune_outlier_edges
from .pairwise import euclidean_matrix
from .rng import make_rng

FAMILY_TOKENS = {
    "two-arcs": "two_arcs",
    "three-spirals": "three_spirals",
    "three-rings": "three_rings",
    "four-gaussians": "four_gaussians",
}
EMBED_TOKENS = {
    "2d": "plane2d",
    "3d": "swiss3d",
    "3d-noise": "swiss3d_noise",
    "10d-noise": "rot10d_noise",
}
SCHEME_TOKENS = {
    "minspan": "min_span",
    "allsubgraphs": "all_subgraphs",
    "alledges": "all_edges",
    "medoids": "medoids",
}
PENALTY_TOKENS = {
    "exponential": "exponential",
    "shifted": "exponential_shifted",
    "plain": "plain",
}
METRIC_TOKENS = {"euclidean": "euclidean", "pknng": "pknng", "min-k": "min_k"}

MNIST_METHOD_ALIASES = {
    "mst": ("euclidean", "mst"),
    "spectral": ("euclidean", "spectral"),
}


def _echo_config(command: str, **settings) -> None:
    click.echo("config: " + json.dumps({"command": command, **settings}, sort_keys=True))


def _runtime_errors(func):
    """Convert runtime failures to exit code 1, leaving click usage errors
    (exit code 2) alone."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except click.ClickException:
            raise
        except Exception as exc:  # noqa: BLE001 - CLI boundary
            raise click.ClickException(f"{type(exc).__name__}: {exc}") from exc

    return wrapper


@click.group()
def main():
    """Penalized knn-graph dissimilarity toolkit."""


@main.command()
@click.option("--family", type=click.Choice(sorted(FAMILY_TOKENS)), required=True)
@click.option("--noise", default="low", show_default=True,
              help="low/medium/high, or an explicit sigma value")
@click.option("--embed", "embedding", type=click.Choice(list(EMBED_TOKENS)), default="2d",
              show_default=True)
@click.option("--n-per-cluster", type=int, default=100, show_default=True)
@click.option("--embed-noise-sigma", type=float, default=None,
              help="override the embedding noise sigma")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@_runtime_errors
def gen(family, noise, embedding, n_per_cluster, embed_noise_sigma, seed, out):
    """Generate a labeled dataset and write it as CSV."""
    try:
        noise_value: str | float = float(noise)
    except ValueError:
        noise_value = noise
    spec = DatasetSpec(family=FAMILY_TOKENS[family], n_per_cluster=n_per_cluster,
                       noise=noise_value, embedding=EMBED_TOKENS[embedding],
                       embed_noise_sigma=embed_noise_sigma, seed=seed)
    _echo_config("gen", family=spec.family, noise=spec.noise, embedding=spec.embedding,
                 n_per_cluster=spec.n_per_cluster, embed_noise_sigma=spec.embed_noise_sigma,
                 seed=spec.seed, out=out)
    ps = generate_dataset(spec)
    io.save_points_csv(ps, out)
    click.echo(f"n={ps.n_points} D={ps.n_dims} C={ps.n_classes}")


@main.command()
@click.option("--in", "in_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--metric", type=click.Choice(sorted(METRIC_TOKENS)), default="pknng",
              show_default=True)
@click.option("--k", type=int, default=5, show_default=True, help="knn-graph neighbor count")
@click.option("--scheme", type=click.Choice(sorted(SCHEME_TOKENS)), default="minspan",
              show_default=True)
@click.option("--penalty", type=click.Choice(sorted(PENALTY_TOKENS)), default="exponential",
              show_default=True)
@click.option("--mu", type=float, default=None, help="explicit penalty scale")
@click.option("--out", type=click.Path(dir_okay=False), required=True,
              help="binary matrix output")
@click.option("--csv-out", type=click.Path(dir_okay=False), default=None,
              help="also export the matrix as CSV")
@click.option("--graph-dump", type=click.Path(dir_okay=False), default=None,
              help="write the final graph as an edge-list text file")
@_runtime_errors
def metric(in_path, metric, k, scheme, penalty, mu, out, csv_out, graph_dump):
    """Compute a dissimilarity matrix for a point-set CSV."""
    metric_name = METRIC_TOKENS[metric]
    _echo_config("metric", input=in_path, metric=metric_name, k=k,
                 scheme=SCHEME_TOKENS[scheme], penalty=PENALTY_TOKENS[penalty], mu=mu,
                 out=out, csv_out=csv_out, graph_dump=graph_dump)
    ps = io.load_points_csv(in_path)
    graph = None
    if metric_name == "euclidean":
        d = euclidean_matrix(ps)
    elif metric_name == "min_k":
        graph, found_k = min_k_connected_graph(ps)
        d = apsp_dijkstra(graph)
        click.echo(f"min connected k={found_k}")
    else:
        config = ConnectorConfig(scheme=SCHEME_TOKENS[scheme],
                                 penalty=PENALTY_TOKENS[penalty], mu=mu)
        dist = euclidean_matrix(ps)
        graph = connect_graph(prune_outlier_edges(build_knn_graph(ps, k=k, dist=dist)),
                              ps, config, dist=dist)
        d = apsp_dijkstra(graph)
    io.save_matrix(d, out)
    if csv_out:
        io.save_matrix_csv(d, csv_out)
    if graph_dump and graph is not None:
        io.dump_graph_edges(graph, graph_dump)
    click.echo(f"wrote {out} (n={d.shape[0]})")


@main.command()
@click.option("--matrix", type=click.Path(exists=True, dir_okay=False), required=True,
              help="binary matrix file, or CSV if the name ends in .csv")
@click.option("--algo", type=click.Choice(["pam", "hc", "mst", "spectral"]), default="pam",
              show_default=True)
@click.option("--k", type=int, required=True, help="number of clusters")
@click.option("--linkage", type=click.Choice(["single", "complete", "average"]),
              default="average", show_default=True)
@click.option("--sigma-factor", type=float, default=1.0, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@_runtime_errors
def cluster(matrix, algo, k, linkage, sigma_factor, seed, out):
    """Cluster a precomputed dissimilarity matrix; write labels CSV."""
    _echo_config("cluster", matrix=matrix, algo=algo, k=k, linkage=linkage,
                 sigma_factor=sigma_factor, seed=seed, out=out)
    d = io.load_matrix_csv(matrix) if matrix.endswith(".csv") else io.load_matrix(matrix)
    if algo == "pam":
        assignment = pam(d, k)
    elif algo == "hc":
        assignment = hierarchical(d, k, linkage)
    elif algo == "mst":
        assignment = mst_cluster(d, k)
    else:
        assignment = spectral(d, k, sigma_factor, rng=make_rng(seed, stream=2))
    io.save_assignment_csv(assignment, out)
    sizes = np.bincount(assignment.labels)
    click.echo(f"wrote {out} (clusters={len(sizes)}, sizes={sizes.tolist()})")


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              required=True)
@click.option("--out-dir", type=click.Path(file_okay=False), required=True)
@click.option("--jobs", type=int, default=1, show_default=True)
@_runtime_errors
def bench(config_path, out_dir, jobs):
    """Run a benchmark grid from a JSON config; resumes completed cells."""
    with open(config_path, "r", encoding="utf-8") as f:
        spec = ExperimentSpec.from_config(json.load(f))
    _echo_config("bench", jobs=jobs, out_dir=out_dir, **spec.to_config())
    cells = run_grid(spec, out_dir, jobs=jobs)
    failures = sum(c["n_failures"] for c in cells)
    click.echo(f"wrote {out_dir}/summary.csv ({len(cells)} cells, {failures} failed realizations)")


def _parse_mnist_method(token: str, knn_k: int, scheme: str, penalty: str,
                        sigma_factor: float, linkage: str) -> MethodSpec:
    if token in MNIST_METHOD_ALIASES:
        metric_name, algo = MNIST_METHOD_ALIASES[token]
    else:
        head, _, algo = token.rpartition("-")
        if head not in METRIC_TOKENS or algo not in ("pam", "hc", "mst", "spectral"):
            raise click.UsageError(
                f"unknown method {token!r}; use e.g. pknng-pam, euclidean-pam, spectral, mst")
        metric_name = METRIC_TOKENS[head]
    return MethodSpec(metric=metric_name, algorithm=algo, scheme=SCHEME_TOKENS[scheme],
                      penalty=PENALTY_TOKENS[penalty], knn_k=knn_k,
                      sigma_factor=sigma_factor, linkage=linkage)


@main.command()
@click.option("--images", type=click.Path(exists=True, dir_okay=False),
              envvar="PKNNG_MNIST_IMAGES", required=True,
              help="IDX image file (.gz ok); env PKNNG_MNIST_IMAGES")
@click.option("--labels", type=click.Path(exists=True, dir_okay=False),
              envvar="PKNNG_MNIST_LABELS", required=True,
              help="IDX label file (.gz ok); env PKNNG_MNIST_LABELS")
@click.option("--digits", default="0,1,2,3,4,5,6,7,8,9", show_default=True,
              help="comma-separated digit classes")
@click.option("--per-class", type=int, default=500, show_default=True)
@click.option("--repeats", type=int, default=10, show_default=True)
@click.option("--method", "methods", multiple=True,
              default=("pknng-pam", "spectral", "euclidean-pam", "mst"), show_default=True)
@click.option("--k", type=int, default=5, show_default=True)
@click.option("--scheme", type=click.Choice(sorted(SCHEME_TOKENS)), default="minspan",
              show_default=True)
@click.option("--penalty", type=click.Choice(sorted(PENALTY_TOKENS)), default="exponential",
              show_default=True)
@click.option("--sigma-factor", type=float, default=1.0, show_default=True)
@click.option("--linkage", type=click.Choice(["single", "complete", "average"]),
              default="average", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@_runtime_errors
def mnist(images, labels, digits, per_class, repeats, methods, k, scheme, penalty,
          sigma_factor, linkage, seed, out):
    """Cluster non-overlapping MNIST digit subsets and tabulate accuracy."""
    digit_list = [int(tok) for tok in digits.split(",") if tok.strip() != ""]
    specs = [_parse_mnist_method(tok, k, scheme, penalty, sigma_factor, linkage)
             for tok in methods]
    _echo_config("mnist", images=images, labels=labels, digits=digit_list,
                 per_class=per_class, repeats=repeats,
                 methods=[m.label() for m in specs], seed=seed, out=out)
    rows = run_mnist(images, labels, digit_list, per_class, repeats, specs, base_seed=seed)
    write_mnist_csv(rows, out)
    for row in rows:
        click.echo(f"{row['method']}: {row['mean_accuracy']:.4f} +- {row['std_accuracy']:.4f}")
    click.echo(f"wrote {out}")


if __name__ == "__main__":
    sys.exit(main())
