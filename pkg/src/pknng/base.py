"""Shared domain types: point sets and cluster assignments."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PointSet:
    """n points in D dimensions with optional ground-truth labels.

    `points` is an (n, D) float array. `labels`, when present, holds dense
    integer class ids starting at 0 with every class represented. `seed`
    records the RNG seed that produced a generated set (None for ingested
    data).
    """

    points: np.ndarray
    labels: np.ndarray | None = None
    seed: int | None = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise ValueError(f"points must be a non-empty 2d array, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ValueError("points must be finite")
        object.__setattr__(self, "points", pts)
        if self.labels is not None:
            labels = np.asarray(self.labels, dtype=np.int64)
            if labels.shape != (pts.shape[0],):
                raise ValueError("labels must be one id per point")
            n_classes = labels.max() + 1 if labels.size else 0
            present = np.unique(labels)
            if labels.min() < 0 or len(present) != n_classes:
                raise ValueError("labels must be dense integers 0..C-1 with every class present")
            object.__setattr__(self, "labels", labels)

    @property
    def n_points(self) -> int:
        return self.points.shape[0]

    @property
    def n_dims(self) -> int:
        return self.points.shape[1]

    @property
    def n_classes(self) -> int:
        if self.labels is None:
            raise ValueError("point set has no labels")
        return int(self.labels.max()) + 1


@dataclass(frozen=True)
class ClusterAssignment:
    """Per-point cluster ids, with medoid indices and objective when the
    algorithm produces them."""

    labels: np.ndarray
    medoids: np.ndarray | None = None
    objective: float | None = None

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64)
        object.__setattr__(self, "labels", labels)
        if self.medoids is not None:
            object.__setattr__(self, "medoids", np.asarray(self.medoids, dtype=np.int64))

    @property
    def n_clusters(self) -> int:
        return int(self.labels.max()) + 1
