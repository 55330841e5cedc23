"""Input validation helpers shared by the functional API and the estimators."""

from __future__ import annotations

import numpy as np

from .base import PointSet


def as_coords(X) -> np.ndarray:
    """Coerce a PointSet or array-like to a validated (n, D) float64 array."""
    if isinstance(X, PointSet):
        return X.points
    coords = np.asarray(X, dtype=np.float64)
    if coords.ndim == 1:
        coords = coords.reshape(-1, 1)
    if coords.ndim != 2 or coords.shape[0] < 1 or coords.shape[1] < 1:
        raise ValueError(f"expected a non-empty (n, D) array, got shape {coords.shape}")
    if not np.all(np.isfinite(coords)):
        raise ValueError("coordinates must be finite")
    return coords


def check_dissimilarity(D, tol: float = 1e-8) -> np.ndarray:
    """Validate a square symmetric nonnegative dissimilarity matrix.

    Returns the matrix as float64 with the diagonal forced to exact zero.
    """
    D = np.asarray(D, dtype=np.float64)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise ValueError(f"dissimilarity matrix must be square, got shape {D.shape}")
    if not np.all(np.isfinite(D)):
        raise ValueError("dissimilarity matrix must be finite")
    if D.min() < 0:
        raise ValueError("dissimilarity matrix must be nonnegative")
    scale = max(D.max(), 1.0)
    if np.abs(D - D.T).max() > tol * scale:
        raise ValueError("dissimilarity matrix must be symmetric")
    if np.abs(np.diagonal(D)).max() > tol * scale:
        raise ValueError("dissimilarity matrix must have a zero diagonal")
    out = D.copy()
    np.fill_diagonal(out, 0.0)
    return out


def check_label_vector(labels, n: int) -> np.ndarray:
    labels = np.asarray(labels, dtype=np.int64)
    if labels.shape != (n,):
        raise ValueError(f"expected {n} labels, got shape {labels.shape}")
    return labels


def check_n_clusters(k: int, n: int) -> int:
    k = int(k)
    if k < 1 or k > n:
        raise ValueError(f"n_clusters must be in [1, {n}], got {k}")
    return k
