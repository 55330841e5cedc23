"""Weighted neighborhood graphs over point sets.

Builds the k-nearest-neighbor graph, prunes long non-reciprocal edges,
labels connected components, and finds the smallest k whose knn-graph is
fully connected.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from enum import IntEnum

import numpy as np
from scipy.sparse import csr_matrix

from .pairwise import euclidean_matrix
from .validation import as_coords

ZERO_WEIGHT_EPS = 1e-12


class EdgeKind(IntEnum):
    ORIGINAL = 0
    ADDED = 1


class DisconnectedGraphError(ValueError):
    """Raised when an operation requires a connected graph."""


class UnionFind:
    """Disjoint sets over 0..n-1 with path compression and union by size."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n
        self.n_components = n

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x: int, y: int) -> bool:
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        if self.size[rx] < self.size[ry]:
            rx, ry = ry, rx
        self.parent[ry] = rx
        self.size[rx] += self.size[ry]
        self.n_components -= 1
        return True


@dataclass(frozen=True)
class WeightedGraph:
    """Undirected sparse weighted graph over point indices.

    Edges are stored once with i < j and are traversable both ways. `kind`
    tags each edge as ORIGINAL (knn edge) or ADDED (connector edge);
    `reciprocal` marks knn edges present in both endpoints' neighbor lists.
    `n_zero_clamped` counts coincident-point edges whose zero length was
    clamped to ZERO_WEIGHT_EPS.
    """

    n_vertices: int
    i: np.ndarray
    j: np.ndarray
    weight: np.ndarray
    kind: np.ndarray
    reciprocal: np.ndarray
    n_zero_clamped: int = 0

    def __post_init__(self):
        i = np.asarray(self.i, dtype=np.int64)
        j = np.asarray(self.j, dtype=np.int64)
        w = np.asarray(self.weight, dtype=np.float64)
        kind = np.asarray(self.kind, dtype=np.uint8)
        rec = np.asarray(self.reciprocal, dtype=bool)
        m = len(i)
        if not (len(j) == len(w) == len(kind) == len(rec) == m):
            raise ValueError("edge arrays must have equal length")
        if m:
            if not np.all(i < j):
                raise ValueError("edges must be stored with i < j (no self-loops)")
            if i.min() < 0 or j.max() >= self.n_vertices:
                raise ValueError("edge endpoints out of range")
            codes = i * self.n_vertices + j
            if len(np.unique(codes)) != m:
                raise ValueError("duplicate edges")
            if not np.all(np.isfinite(w)) or w.min() <= 0:
                raise ValueError("edge weights must be positive and finite")
        for name, arr in (("i", i), ("j", j), ("weight", w), ("kind", kind), ("reciprocal", rec)):
            object.__setattr__(self, name, arr)

    @property
    def n_edges(self) -> int:
        return len(self.i)

    @property
    def original_mask(self) -> np.ndarray:
        return self.kind == EdgeKind.ORIGINAL

    def select(self, mask: np.ndarray) -> "WeightedGraph":
        """Subgraph keeping only the edges where `mask` is true."""
        return replace(
            self,
            i=self.i[mask], j=self.j[mask], weight=self.weight[mask],
            kind=self.kind[mask], reciprocal=self.reciprocal[mask],
        )

    def add_edges(self, i, j, weight, kind: EdgeKind, reciprocal=False) -> "WeightedGraph":
        i = np.asarray(i, dtype=np.int64)
        j = np.asarray(j, dtype=np.int64)
        lo, hi = np.minimum(i, j), np.maximum(i, j)
        m = len(lo)
        return replace(
            self,
            i=np.concatenate([self.i, lo]),
            j=np.concatenate([self.j, hi]),
            weight=np.concatenate([self.weight, np.asarray(weight, dtype=np.float64)]),
            kind=np.concatenate([self.kind, np.full(m, int(kind), dtype=np.uint8)]),
            reciprocal=np.concatenate([self.reciprocal, np.full(m, bool(reciprocal))]),
        )

    def to_csr(self) -> csr_matrix:
        """Symmetric CSR adjacency (both directions materialized)."""
        rows = np.concatenate([self.i, self.j])
        cols = np.concatenate([self.j, self.i])
        vals = np.concatenate([self.weight, self.weight])
        return csr_matrix((vals, (rows, cols)), shape=(self.n_vertices, self.n_vertices))


@dataclass(frozen=True)
class ComponentLabeling:
    """Connected-component ids, assigned in order of smallest member vertex."""

    component_of: np.ndarray
    n_components: int

    def members(self, c: int) -> np.ndarray:
        return np.flatnonzero(self.component_of == c)


def components(g: WeightedGraph, include_added: bool = False) -> ComponentLabeling:
    """Connected components over ORIGINAL edges (or all edges if asked)."""
    uf = UnionFind(g.n_vertices)
    mask = np.ones(g.n_edges, dtype=bool) if include_added else g.original_mask
    for a, b in zip(g.i[mask].tolist(), g.j[mask].tolist()):
        uf.union(a, b)
    ids = {}
    out = np.empty(g.n_vertices, dtype=np.int64)
    for v in range(g.n_vertices):
        root = uf.find(v)
        if root not in ids:
            ids[root] = len(ids)
        out[v] = ids[root]
    return ComponentLabeling(component_of=out, n_components=len(ids))


def _neighbor_order(dist: np.ndarray) -> np.ndarray:
    """Per-row neighbor indices sorted by (distance, index), self excluded."""
    n = dist.shape[0]
    masked = dist.copy()
    np.fill_diagonal(masked, np.inf)
    order = np.argsort(masked, axis=1, kind="stable")
    return order[:, : n - 1]


def _graph_from_neighbor_order(dist: np.ndarray, order: np.ndarray, k: int) -> WeightedGraph:
    n = dist.shape[0]
    src = np.repeat(np.arange(n, dtype=np.int64), k)
    dst = order[:, :k].astype(np.int64).ravel()
    lo = np.minimum(src, dst)
    hi = np.maximum(src, dst)
    codes, counts = np.unique(lo * n + hi, return_counts=True)
    i = codes // n
    j = codes % n
    w = dist[i, j].copy()
    zero = w <= 0.0
    n_clamped = int(zero.sum())
    if n_clamped:
        warnings.warn(
            f"{n_clamped} zero-length knn edge(s) from coincident points clamped to {ZERO_WEIGHT_EPS}",
            stacklevel=3,
        )
        w[zero] = ZERO_WEIGHT_EPS
    return WeightedGraph(
        n_vertices=n, i=i, j=j, weight=w,
        kind=np.zeros(len(i), dtype=np.uint8),
        reciprocal=counts == 2,
        n_zero_clamped=n_clamped,
    )


def build_knn_graph(X, k: int = 5, dist: np.ndarray | None = None) -> WeightedGraph:
    """knn-graph: an edge from each vertex to its k nearest Euclidean
    neighbors, weighted by distance, stored once per unordered pair.

    Ties in distance break toward the lower point index. `dist` lets a
    caller reuse a precomputed Euclidean matrix.
    """
    coords = as_coords(X)
    n = coords.shape[0]
    k = int(k)
    if not 1 <= k < n:
        raise ValueError(f"k must satisfy 1 <= k < n; got k={k}, n={n}")
    if dist is None:
        dist = euclidean_matrix(coords)
    return _graph_from_neighbor_order(dist, _neighbor_order(dist), k)


def prune_outlier_edges(g: WeightedGraph) -> WeightedGraph:
    """Drop edges that are both non-reciprocal and longer than
    Q3 + 1.5 IQR of the graph's full edge-weight distribution.

    Quartiles use the linear-interpolation convention. Single pass; the
    threshold is computed once on the unpruned distribution.
    """
    if g.n_edges == 0:
        return g
    q1, q3 = np.quantile(g.weight, [0.25, 0.75])
    threshold = q3 + 1.5 * (q3 - q1)
    drop = (~g.reciprocal) & (g.weight > threshold)
    return g.select(~drop)


def min_k_connected_graph(X) -> tuple[WeightedGraph, int]:
    """Unpruned knn-graph at the smallest k in [1, n-1] that connects it.

    Scans k upward, growing a union-find incrementally with each added
    neighbor rank, so the scan costs one neighbor-sort total.
    """
    coords = as_coords(X)
    n = coords.shape[0]
    if n < 2:
        raise ValueError("need at least 2 points")
    dist = euclidean_matrix(coords)
    order = _neighbor_order(dist)
    uf = UnionFind(n)
    for k in range(1, n):
        for v in range(n):
            uf.union(v, int(order[v, k - 1]))
        if uf.n_components == 1:
            return _graph_from_neighbor_order(dist, order, k), k
    raise AssertionError("knn-graph at k = n-1 is always connected")
