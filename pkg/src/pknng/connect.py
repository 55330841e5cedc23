"""Connector edges: make a pruned neighborhood graph fully connected.

Four schemes choose which point pairs to bridge; connector weights are the
Euclidean length amplified by an exponential penalty scaled by the mean
original edge weight, so bridges between far-apart subgraphs cost far more
than bridges between fragments of the same structure.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .graph import ZERO_WEIGHT_EPS, EdgeKind, UnionFind, WeightedGraph, components
from .pairwise import euclidean_matrix, mean_pairwise_distance
from .validation import as_coords

# exp() overflows IEEE doubles near 709; clip so connector weights stay
# finite even for pathological length/scale ratios
_MAX_EXPONENT = 500.0


class Scheme(str, Enum):
    MIN_SPAN = "min_span"
    ALL_SUBGRAPHS = "all_subgraphs"
    ALL_EDGES = "all_edges"
    MEDOIDS = "medoids"


class Penalty(str, Enum):
    EXPONENTIAL = "exponential"
    EXPONENTIAL_SHIFTED = "exponential_shifted"
    PLAIN = "plain"


@dataclass(frozen=True)
class ConnectorConfig:
    """Connection scheme, penalty form, and optional explicit length scale.

    `mu=None` means: use the mean ORIGINAL edge weight of the (pruned)
    graph, falling back to the mean pairwise distance when the graph has
    no original edges.
    """

    scheme: Scheme = Scheme.MIN_SPAN
    penalty: Penalty = Penalty.EXPONENTIAL
    mu: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        object.__setattr__(self, "penalty", Penalty(self.penalty))
        if self.mu is not None and self.mu <= 0:
            raise ValueError("mu must be positive")


def mean_edge_weight(g: WeightedGraph) -> float:
    """Mean weight of the graph's ORIGINAL edges."""
    mask = g.original_mask
    if not mask.any():
        raise ValueError("graph has no original edges; fall back to mean pairwise distance")
    return float(g.weight[mask].mean())


def penalized_weight(d, mu: float, penalty: Penalty | str = Penalty.EXPONENTIAL):
    """Connector weight for Euclidean length d at scale mu.

    exponential: d * e^(d/mu); exponential_shifted: d * e^(d/mu - 1),
    which leaves lengths equal to mu unpenalized; plain: d unchanged.
    Accepts scalars or arrays.
    """
    penalty = Penalty(penalty)
    if mu <= 0:
        raise ValueError("mu must be positive")
    d = np.asarray(d, dtype=np.float64)
    if np.any(d < 0):
        raise ValueError("distances must be nonnegative")
    if penalty is Penalty.PLAIN:
        out = d.copy()
    else:
        shift = 0.0 if penalty is Penalty.EXPONENTIAL else 1.0
        out = d * np.exp(np.minimum(d / mu - shift, _MAX_EXPONENT))
    return float(out) if out.ndim == 0 else out


def resolve_mu(g: WeightedGraph, X, config: ConnectorConfig) -> float:
    if config.mu is not None:
        return config.mu
    try:
        return mean_edge_weight(g)
    except ValueError:
        return mean_pairwise_distance(X)


def _component_min_pairs(dist: np.ndarray, member_lists: list[np.ndarray]):
    """Per unordered component pair, the minimum-distance point pair.

    Returns (comp_a, comp_b, i, j, length) arrays; ties break toward the
    lowest point indices because members are scanned in ascending order.
    """
    rows = []
    n_comp = len(member_lists)
    for a in range(n_comp):
        ia = member_lists[a]
        for b in range(a + 1, n_comp):
            ib = member_lists[b]
            sub = dist[np.ix_(ia, ib)]
            flat = int(np.argmin(sub))
            r, c = divmod(flat, sub.shape[1])
            rows.append((a, b, int(ia[r]), int(ib[c]), float(sub[r, c])))
    return rows


def _component_medoid(dist: np.ndarray, members: np.ndarray) -> int:
    sums = dist[np.ix_(members, members)].sum(axis=1)
    return int(members[int(np.argmin(sums))])


def connect_graph(
    g: WeightedGraph, X, config: ConnectorConfig | None = None, dist: np.ndarray | None = None
) -> WeightedGraph:
    """Add penalized connector edges until the graph is connected.

    min_span: a minimum spanning set over the subgraphs, using each
    component pair's closest point pair as the candidate edge.
    all_subgraphs: the closest point pair for every component pair.
    all_edges: every point pair not already an original edge.
    medoids: all pairs of per-component medoids.

    min_span and all_subgraphs return the graph unchanged when it is
    already connected; all_edges and medoids add their edges regardless.
    """
    config = ConnectorConfig() if config is None else config
    coords = as_coords(X)
    if coords.shape[0] != g.n_vertices:
        raise ValueError("point set and graph size disagree")
    if dist is None:
        dist = euclidean_matrix(coords)

    labeling = components(g)
    n_comp = labeling.n_components
    scheme = config.scheme
    if n_comp == 1 and scheme in (Scheme.MIN_SPAN, Scheme.ALL_SUBGRAPHS):
        return g

    if scheme is Scheme.ALL_EDGES:
        n = g.n_vertices
        present = np.zeros((n, n), dtype=bool)
        present[g.i, g.j] = True
        cand_i, cand_j = np.nonzero(np.triu(~present, k=1))
    else:
        member_lists = [labeling.members(c) for c in range(n_comp)]
        pairs = _component_min_pairs(dist, member_lists)
        if scheme is Scheme.MIN_SPAN:
            pairs.sort(key=lambda row: (row[4], row[2], row[3]))
            uf = UnionFind(n_comp)
            pairs = [row for row in pairs if uf.union(row[0], row[1])]
        elif scheme is Scheme.MEDOIDS:
            medoids = [_component_medoid(dist, m) for m in member_lists]
            pairs = [
                (a, b, medoids[a], medoids[b], dist[medoids[a], medoids[b]])
                for a in range(n_comp)
                for b in range(a + 1, n_comp)
            ]
        cand_i = np.array([row[2] for row in pairs], dtype=np.int64)
        cand_j = np.array([row[3] for row in pairs], dtype=np.int64)

    if len(cand_i) == 0:
        return g
    mu = resolve_mu(g, coords, config)
    lengths = dist[cand_i, cand_j]
    weights = np.maximum(penalized_weight(lengths, mu, config.penalty), ZERO_WEIGHT_EPS)
    return g.add_edges(cand_i, cand_j, weights, EdgeKind.ADDED)
