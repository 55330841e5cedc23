import os
from pathlib import Path

import numpy as np
import pytest

REPO_ROOT = Path(__file__).resolve().parent.parent


def mnist_paths():
    """Resolve the MNIST training files: env vars first, then the repo
    data directory. Returns (images, labels) or None."""
    images = os.environ.get("PKNNG_MNIST_IMAGES")
    labels = os.environ.get("PKNNG_MNIST_LABELS")
    if images and labels and Path(images).exists() and Path(labels).exists():
        return images, labels
    data_dir = Path(os.environ.get("PKNNG_MNIST_DIR", REPO_ROOT / "data" / "mnist"))
    for suffix in (".gz", ""):
        img = data_dir / f"train-images-idx3-ubyte{suffix}"
        lab = data_dir / f"train-labels-idx1-ubyte{suffix}"
        if img.exists() and lab.exists():
            return str(img), str(lab)
    return None


@pytest.fixture(scope="session")
def mnist_files():
    paths = mnist_paths()
    if paths is None:
        pytest.skip("MNIST training files not found (set PKNNG_MNIST_IMAGES/"
                    "PKNNG_MNIST_LABELS or put them under data/mnist/)")
    return paths


def random_dissimilarity(rng: np.random.Generator, n: int, low=0.1, high=1.0) -> np.ndarray:
    """Random symmetric nonnegative matrix with zero diagonal (no triangle
    inequality implied)."""
    d = rng.uniform(low, high, (n, n))
    d = (d + d.T) / 2.0
    np.fill_diagonal(d, 0.0)
    return d


def random_connected_graph(rng: np.random.Generator, n: int, extra_edge_prob=0.15):
    """Random spanning tree plus random extra edges; positive weights."""
    from pknng.graph import WeightedGraph

    edges = {}
    order = rng.permutation(n)
    for idx in range(1, n):
        a = int(order[idx])
        b = int(order[rng.integers(0, idx)])
        edges[(min(a, b), max(a, b))] = float(rng.uniform(0.1, 2.0))
    for i in range(n):
        for j in range(i + 1, n):
            if (i, j) not in edges and rng.uniform() < extra_edge_prob:
                edges[(i, j)] = float(rng.uniform(0.1, 2.0))
    m = len(edges)
    return WeightedGraph(
        n_vertices=n,
        i=np.array([e[0] for e in edges], dtype=np.int64),
        j=np.array([e[1] for e in edges], dtype=np.int64),
        weight=np.array(list(edges.values()), dtype=float),
        kind=np.zeros(m, dtype=np.uint8),
        reciprocal=np.zeros(m, dtype=bool),
    )


def all_simple_paths_shortest(g) -> np.ndarray:
    """Exhaustive oracle: minimum total weight over every simple path."""
    n = g.n_vertices
    adjacency = [[] for _ in range(n)]
    for i, j, w in zip(g.i, g.j, g.weight):
        adjacency[i].append((int(j), float(w)))
        adjacency[j].append((int(i), float(w)))
    best = np.full((n, n), np.inf)
    np.fill_diagonal(best, 0.0)

    def walk(start, v, visited, length):
        for w, weight in adjacency[v]:
            if w in visited:
                continue
            total = length + weight
            if total < best[start, w]:
                best[start, w] = total
            walk(start, w, visited | {w}, total)

    for s in range(n):
        walk(s, s, {s}, 0.0)
    return best
