"""Penalized knn-graph geodesic dissimilarity for manifold clustering."""

from .base import ClusterAssignment, PointSet
from .cluster import (
    PAM,
    Agglomerative,
    MSTClustering,
    SpectralClustering,
    accuracy,
    hierarchical,
    mst_cluster,
    pam,
    spectral,
)
from .connect import (
    ConnectorConfig,
    Penalty,
    Scheme,
    connect_graph,
    mean_edge_weight,
    penalized_weight,
)
from .datasets import (
    DatasetSpec,
    embed,
    gen_four_gaussians,
    gen_three_rings,
    gen_three_spirals,
    gen_two_arcs,
    generate_dataset,
    load_mnist_idx,
    sample_digit_subsets,
)
from .geodesic import apsp_dijkstra, apsp_floyd_warshall
from .graph import (
    ComponentLabeling,
    DisconnectedGraphError,
    EdgeKind,
    WeightedGraph,
    build_knn_graph,
    components,
    min_k_connected_graph,
    prune_outlier_edges,
)
from .manifold import PKNNG, pknng_metric
from .pairwise import euclidean_matrix, mean_pairwise_distance
from .rng import derive_seed, make_rng

__version__ = "0.1.0"

__all__ = [
    "PKNNG",
    "PAM",
    "Agglomerative",
    "ClusterAssignment",
    "ComponentLabeling",
    "ConnectorConfig",
    "DatasetSpec",
    "DisconnectedGraphError",
    "EdgeKind",
    "MSTClustering",
    "Penalty",
    "PointSet",
    "Scheme",
    "SpectralClustering",
    "WeightedGraph",
    "accuracy",
    "apsp_dijkstra",
    "apsp_floyd_warshall",
    "build_knn_graph",
    "components",
    "connect_graph",
    "derive_seed",
    "embed",
    "euclidean_matrix",
    "gen_four_gaussians",
    "gen_three_rings",
    "gen_three_spirals",
    "gen_two_arcs",
    "generate_dataset",
    "hierarchical",
    "load_mnist_idx",
    "make_rng",
    "mean_edge_weight",
    "mean_pairwise_distance",
    "min_k_connected_graph",
    "mst_cluster",
    "pam",
    "penalized_weight",
    "pknng_metric",
    "prune_outlier_edges",
    "sample_digit_subsets",
    "spectral",
]
