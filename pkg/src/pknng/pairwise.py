"""Euclidean baseline dissimilarity and summary statistics."""

from __future__ import annotations

import numpy as np
from scipy.spatial.distance import cdist

from .validation import as_coords


def euclidean_matrix(X) -> np.ndarray:
    """Full pairwise Euclidean distance matrix (n x n, symmetric, zero diag)."""
    coords = as_coords(X)
    d = cdist(coords, coords)
    np.fill_diagonal(d, 0.0)
    return d


def mean_pairwise_distance(X) -> float:
    """Mean of the n(n-1)/2 distinct pairwise Euclidean distances."""
    coords = as_coords(X)
    n = coords.shape[0]
    if n < 2:
        raise ValueError("mean pairwise distance needs at least 2 points")
    d = euclidean_matrix(coords)
    iu = np.triu_indices(n, k=1)
    return float(d[iu].mean())
