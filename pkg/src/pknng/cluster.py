"""Clustering algorithms over a precomputed dissimilarity matrix.

All functions take an (n, n) symmetric dissimilarity and a cluster count;
estimator classes wrap them in the fit/fit_predict idiom. Nothing here
ever touches raw coordinates, so any dissimilarity (Euclidean, geodesic,
kernelized) plugs in unchanged.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import minimum_spanning_tree
from sklearn.base import BaseEstimator, ClusterMixin

from .base import ClusterAssignment
from .graph import UnionFind
from .rng import as_generator
from .validation import check_dissimilarity, check_label_vector, check_n_clusters

_LINKAGES = ("single", "complete", "average")
# accept a swap only if it beats the incumbent by more than float noise
_SWAP_TOL = 1e-12


def _nearest_two(D: np.ndarray, medoids: np.ndarray):
    """Distance and medoid position of the closest and second-closest
    medoid for every point (ties toward the lower medoid index)."""
    sub = D[:, medoids]
    pos1 = np.argmin(sub, axis=1)
    rows = np.arange(len(D))
    d1 = sub[rows, pos1]
    if len(medoids) == 1:
        return d1, pos1, np.full(len(D), np.inf)
    sub = sub.copy()
    sub[rows, pos1] = np.inf
    d2 = sub.min(axis=1)
    return d1, pos1, d2


def pam(D, n_clusters: int) -> ClusterAssignment:
    """Partitioning around medoids: greedy BUILD seeding, then repeated
    best-improvement medoid swaps until no swap lowers the objective.

    Deterministic: BUILD ties and SWAP ties break toward the lowest
    (medoid, candidate) indices. Objective is the summed dissimilarity of
    each point to its closest medoid.
    """
    D = check_dissimilarity(D)
    n = len(D)
    k = check_n_clusters(n_clusters, n)

    # BUILD
    medoids = [int(np.argmin(D.sum(axis=0)))]
    nearest = D[medoids[0]].copy()
    while len(medoids) < k:
        is_medoid = np.zeros(n, dtype=bool)
        is_medoid[medoids] = True
        cand = np.flatnonzero(~is_medoid)
        totals = np.minimum(nearest[None, :], D[cand, :]).sum(axis=1)
        best = int(cand[int(np.argmin(totals))])
        medoids.append(best)
        nearest = np.minimum(nearest, D[best])
    medoids = np.array(sorted(medoids), dtype=np.int64)

    # SWAP
    while k < n:
        d1, pos1, d2 = _nearest_two(D, medoids)
        objective = d1.sum()
        is_medoid = np.zeros(n, dtype=bool)
        is_medoid[medoids] = True
        candidates = np.flatnonzero(~is_medoid)
        best_delta = -_SWAP_TOL
        best_swap = None
        for pos in range(k):
            fallback = np.where(pos1 == pos, d2, d1)
            totals = np.minimum(fallback[None, :], D[candidates, :]).sum(axis=1)
            idx = int(np.argmin(totals))
            delta = totals[idx] - objective
            if delta < best_delta:
                best_delta = delta
                best_swap = (pos, int(candidates[idx]))
        if best_swap is None:
            break
        pos, newcomer = best_swap
        medoids = np.array(sorted(np.append(np.delete(medoids, pos), newcomer)), dtype=np.int64)

    labels = np.argmin(D[:, medoids], axis=1)
    objective = float(D[np.arange(n), medoids[labels]].sum())
    return ClusterAssignment(labels=labels, medoids=medoids, objective=objective)


def hierarchical(D, n_clusters: int, linkage: str = "average") -> ClusterAssignment:
    """Agglomerative clustering cut at n_clusters, with single, complete,
    or average linkage (Lance-Williams recurrences).

    Merge ties break toward the smallest cluster-representative pair; a
    cluster is represented by its smallest member index.
    """
    if linkage not in _LINKAGES:
        raise ValueError(f"linkage must be one of {_LINKAGES}, got {linkage!r}")
    D = check_dissimilarity(D)
    n = len(D)
    k = check_n_clusters(n_clusters, n)

    work = D.astype(np.float64, copy=True)
    np.fill_diagonal(work, np.inf)
    sizes = np.ones(n)
    rep = np.arange(n, dtype=np.int64)  # cluster representative per point
    alive = np.ones(n, dtype=bool)

    for _ in range(n - k):
        flat = int(np.argmin(work))
        a, b = divmod(flat, n)  # a < b: row-major argmin hits (min, max) first
        others = alive.copy()
        others[[a, b]] = False
        da, db = work[a, others], work[b, others]
        if linkage == "single":
            merged = np.minimum(da, db)
        elif linkage == "complete":
            merged = np.maximum(da, db)
        else:
            merged = (sizes[a] * da + sizes[b] * db) / (sizes[a] + sizes[b])
        work[a, others] = merged
        work[others, a] = merged
        work[b, :] = np.inf
        work[:, b] = np.inf
        sizes[a] += sizes[b]
        alive[b] = False
        rep[rep == b] = a

    _, labels = np.unique(rep, return_inverse=True)
    return ClusterAssignment(labels=labels.astype(np.int64))


def mst_cluster(D, n_clusters: int) -> ClusterAssignment:
    """Cut the minimum spanning tree of the complete dissimilarity graph:
    delete its n_clusters - 1 heaviest edges, components are the clusters."""
    D = check_dissimilarity(D)
    n = len(D)
    k = check_n_clusters(n_clusters, n)
    if n == 1:
        return ClusterAssignment(labels=np.zeros(1, dtype=np.int64))

    # zero off-diagonal entries (coincident points) would read as missing
    # edges; clamp them to a subnormal-free tiny weight
    upper = np.triu(D, k=1)
    zero_pairs = np.triu(np.ones((n, n), dtype=bool), k=1) & (upper == 0)
    upper[zero_pairs] = 1e-300
    tree = minimum_spanning_tree(csr_matrix(upper)).tocoo()

    order = np.lexsort((tree.col, tree.row, -tree.data))
    keep = order[max(k - 1, 0) :]
    uf = UnionFind(n)
    for e in keep:
        uf.union(int(tree.row[e]), int(tree.col[e]))
    roots = np.array([uf.find(v) for v in range(n)])
    _, labels = np.unique(roots, return_inverse=True)
    return ClusterAssignment(labels=labels.astype(np.int64))


def _kmeans_pp_init(Y: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = len(Y)
    centers = np.empty((k, Y.shape[1]))
    centers[0] = Y[rng.integers(n)]
    closest = ((Y - centers[0]) ** 2).sum(axis=1)
    for c in range(1, k):
        total = closest.sum()
        if total > 0:
            probs = closest / total
            idx = rng.choice(n, p=probs)
        else:
            idx = rng.integers(n)
        centers[c] = Y[idx]
        closest = np.minimum(closest, ((Y - centers[c]) ** 2).sum(axis=1))
    return centers


def _kmeans(Y: np.ndarray, k: int, rng: np.random.Generator,
            n_restarts: int = 10, max_iter: int = 300) -> np.ndarray:
    n = len(Y)
    best_labels = None
    best_inertia = np.inf
    for _ in range(n_restarts):
        centers = _kmeans_pp_init(Y, k, rng)
        labels = np.full(n, -1)
        for _ in range(max_iter):
            d2 = ((Y[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
            new_labels = np.argmin(d2, axis=1)
            if np.array_equal(new_labels, labels):
                break
            labels = new_labels
            for c in range(k):
                members = labels == c
                if members.any():
                    centers[c] = Y[members].mean(axis=0)
                else:
                    # revive an empty cluster at the worst-served point
                    centers[c] = Y[int(np.argmax(d2[np.arange(n), labels]))]
        inertia = float(((Y - centers[labels]) ** 2).sum())
        if inertia < best_inertia:
            best_inertia = inertia
            best_labels = labels
    return best_labels


def gaussian_affinity(D: np.ndarray, sigma_factor: float = 1.0) -> np.ndarray:
    """exp(-d^2 / 2 sigma^2) affinity with a zeroed diagonal, sigma set to
    sigma_factor times the mean off-diagonal dissimilarity."""
    n = len(D)
    iu = np.triu_indices(n, k=1)
    sigma = sigma_factor * float(D[iu].mean())
    if sigma <= 0:
        raise ValueError("degenerate dissimilarity matrix: all distances are zero")
    affinity = np.exp(-(D ** 2) / (2.0 * sigma ** 2))
    np.fill_diagonal(affinity, 0.0)
    return affinity


def spectral_embedding(affinity: np.ndarray, k: int) -> np.ndarray:
    """Rows of the top-k eigenvectors of the symmetric degree-normalized
    affinity, each row scaled to unit length."""
    inv_sqrt_degree = 1.0 / np.sqrt(affinity.sum(axis=1))
    normalized = affinity * inv_sqrt_degree[:, None] * inv_sqrt_degree[None, :]
    _, vectors = np.linalg.eigh(normalized)
    embedding = vectors[:, -k:]
    norms = np.linalg.norm(embedding, axis=1, keepdims=True)
    return embedding / np.where(norms > 0, norms, 1.0)


def spectral(D, n_clusters: int, sigma_factor: float = 1.0, rng=None) -> ClusterAssignment:
    """Spectral clustering of a dissimilarity matrix.

    Gaussian affinity with sigma = sigma_factor * mean off-diagonal
    dissimilarity and a zeroed diagonal; symmetric degree normalization;
    the top n_clusters eigenvectors row-normalized to the unit sphere and
    clustered by k-means (10 seeded restarts, best inertia kept).
    """
    D = check_dissimilarity(D)
    n = len(D)
    k = check_n_clusters(n_clusters, n)
    if sigma_factor <= 0:
        raise ValueError("sigma_factor must be positive")
    if k == 1:
        return ClusterAssignment(labels=np.zeros(n, dtype=np.int64))
    rng = as_generator(rng)
    embedding = spectral_embedding(gaussian_affinity(D, sigma_factor), k)
    labels = _kmeans(embedding, k, rng)
    return ClusterAssignment(labels=labels.astype(np.int64))


def accuracy(assignment, truth) -> float:
    """Fraction of points whose cluster maps to their true class under the
    best injective cluster-to-class matching (Hungarian on the padded
    confusion-count matrix)."""
    pred = assignment.labels if isinstance(assignment, ClusterAssignment) else np.asarray(assignment)
    truth = np.asarray(truth)
    if pred.shape != truth.shape:
        raise ValueError(f"label lengths differ: {pred.shape} vs {truth.shape}")
    n = len(pred)
    pred = check_label_vector(pred, n)
    truth = check_label_vector(truth, n)

    n_pred = int(pred.max()) + 1
    n_true = int(truth.max()) + 1
    side = max(n_pred, n_true)
    confusion = np.zeros((side, side), dtype=np.int64)
    np.add.at(confusion, (pred, truth), 1)
    rows, cols = linear_sum_assignment(confusion, maximize=True)
    return float(confusion[rows, cols].sum()) / n


class PAM(BaseEstimator, ClusterMixin):
    """k-medoids over a precomputed dissimilarity matrix.

    Parameters
    ----------
    n_clusters : int, default=8

    Attributes
    ----------
    labels_ : ndarray of shape (n,)
    medoid_indices_ : ndarray of shape (n_clusters,)
    inertia_ : float
        Summed dissimilarity of points to their medoids.
    """

    def __init__(self, n_clusters=8):
        self.n_clusters = n_clusters

    def fit(self, X, y=None):
        result = pam(X, self.n_clusters)
        self.labels_ = result.labels
        self.medoid_indices_ = result.medoids
        self.inertia_ = result.objective
        return self


class Agglomerative(BaseEstimator, ClusterMixin):
    """Hierarchical agglomerative clustering over a precomputed
    dissimilarity matrix, cut at n_clusters."""

    def __init__(self, n_clusters=2, linkage="average"):
        self.n_clusters = n_clusters
        self.linkage = linkage

    def fit(self, X, y=None):
        self.labels_ = hierarchical(X, self.n_clusters, self.linkage).labels
        return self


class MSTClustering(BaseEstimator, ClusterMixin):
    """Minimum-spanning-tree cut clustering over a precomputed
    dissimilarity matrix (equivalent to single linkage)."""

    def __init__(self, n_clusters=2):
        self.n_clusters = n_clusters

    def fit(self, X, y=None):
        self.labels_ = mst_cluster(X, self.n_clusters).labels
        return self


class SpectralClustering(BaseEstimator, ClusterMixin):
    """Spectral clustering over a precomputed dissimilarity matrix with an
    automatically scaled Gaussian affinity.

    Parameters
    ----------
    n_clusters : int, default=8
    sigma_factor : float, default=1.0
        Kernel width as a multiple of the mean pairwise dissimilarity.
    random_state : int or Generator or None
        Seeds the k-means restarts.
    """

    def __init__(self, n_clusters=8, sigma_factor=1.0, random_state=None):
        self.n_clusters = n_clusters
        self.sigma_factor = sigma_factor
        self.random_state = random_state

    def fit(self, X, y=None):
        result = spectral(X, self.n_clusters, self.sigma_factor,
                          rng=as_generator(self.random_state))
        self.labels_ = result.labels
        return self
