"""All-pairs shortest-path distances on a connected weighted graph."""

from __future__ import annotations

import numpy as np
from scipy.sparse import csgraph

from .graph import DisconnectedGraphError, WeightedGraph, components


def _require_connected(g: WeightedGraph) -> None:
    labeling = components(g, include_added=True)
    if labeling.n_components > 1:
        a = int(labeling.members(0)[0])
        b = int(labeling.members(1)[0])
        raise DisconnectedGraphError(
            f"graph has {labeling.n_components} components; no path joins "
            f"vertex {a} (component 0) to vertex {b} (component 1)"
        )


def apsp_dijkstra(g: WeightedGraph) -> np.ndarray:
    """Shortest-path distance matrix via per-source Dijkstra runs."""
    _require_connected(g)
    if g.n_vertices == 1:
        return np.zeros((1, 1))
    d = csgraph.dijkstra(g.to_csr(), directed=False)
    d = np.minimum(d, d.T)
    np.fill_diagonal(d, 0.0)
    return d


def apsp_floyd_warshall(g: WeightedGraph) -> np.ndarray:
    """Shortest-path distance matrix via the O(n^3) relaxation sweep.

    Independent of apsp_dijkstra; kept as a cross-check and for small
    dense graphs.
    """
    _require_connected(g)
    n = g.n_vertices
    d = np.full((n, n), np.inf)
    np.fill_diagonal(d, 0.0)
    d[g.i, g.j] = g.weight
    d[g.j, g.i] = g.weight
    for k in range(n):
        np.minimum(d, d[:, k : k + 1] + d[k : k + 1, :], out=d)
    return d
