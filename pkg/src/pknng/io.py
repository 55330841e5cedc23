"""File formats: point-set CSV, dissimilarity matrix binary/CSV, label CSV,
and the graph edge-list debug dump."""

from __future__ import annotations

import csv
import struct

import numpy as np

from .base import ClusterAssignment, PointSet
from .graph import EdgeKind, WeightedGraph

MATRIX_MAGIC = b"PKNNGDM1"


def save_points_csv(ps: PointSet, path) -> None:
    """Header `x0,...,x{D-1}[,label]`, one point per row, repr-round-trip
    floats."""
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        header = [f"x{d}" for d in range(ps.n_dims)]
        if ps.labels is not None:
            header.append("label")
        writer.writerow(header)
        for row_idx in range(ps.n_points):
            row = [repr(float(v)) for v in ps.points[row_idx]]
            if ps.labels is not None:
                row.append(str(int(ps.labels[row_idx])))
            writer.writerow(row)


def load_points_csv(path) -> PointSet:
    """Read the point-set CSV; arbitrary label symbols are remapped to
    dense integers from 0 (sorted symbol order)."""
    with open(path, "r", newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if not header:
            raise ValueError(f"{path}: empty file")
        has_label = header[-1].strip().lower() == "label"
        n_dims = len(header) - (1 if has_label else 0)
        if n_dims < 1:
            raise ValueError(f"{path}: no coordinate columns")
        coords, symbols = [], []
        for row in reader:
            if not row:
                continue
            coords.append([float(v) for v in row[:n_dims]])
            if has_label:
                symbols.append(row[n_dims].strip())
    if not coords:
        raise ValueError(f"{path}: no data rows")
    points = np.asarray(coords)
    labels = None
    if has_label:
        _, labels = np.unique(np.asarray(symbols), return_inverse=True)
    return PointSet(points=points, labels=labels)


def save_matrix(d: np.ndarray, path) -> None:
    """Binary layout: 8-byte magic, little-endian uint64 n, then n*n
    little-endian float64 values row-major."""
    d = np.ascontiguousarray(d, dtype="<f8")
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise ValueError("matrix must be square")
    with open(path, "wb") as f:
        f.write(MATRIX_MAGIC)
        f.write(struct.pack("<Q", d.shape[0]))
        f.write(d.tobytes(order="C"))


def load_matrix(path) -> np.ndarray:
    with open(path, "rb") as f:
        blob = f.read()
    if blob[: len(MATRIX_MAGIC)] != MATRIX_MAGIC:
        raise ValueError(f"{path}: not a dissimilarity matrix file (bad magic)")
    (n,) = struct.unpack_from("<Q", blob, len(MATRIX_MAGIC))
    offset = len(MATRIX_MAGIC) + 8
    expected = offset + n * n * 8
    if len(blob) != expected:
        raise ValueError(f"{path}: expected {expected} bytes for n={n}, got {len(blob)}")
    return np.frombuffer(blob, dtype="<f8", offset=offset).reshape(n, n).copy()


def save_matrix_csv(d: np.ndarray, path) -> None:
    np.savetxt(path, np.asarray(d), delimiter=",", fmt="%.17g")


def load_matrix_csv(path) -> np.ndarray:
    return np.atleast_2d(np.loadtxt(path, delimiter=","))


def save_assignment_csv(assignment, path) -> None:
    """`point_index,cluster_id` rows."""
    labels = assignment.labels if isinstance(assignment, ClusterAssignment) else np.asarray(assignment)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["point_index", "cluster_id"])
        for idx, lab in enumerate(labels):
            writer.writerow([idx, int(lab)])


def dump_graph_edges(g: WeightedGraph, path) -> None:
    """Edge-list text dump: `i j weight kind reciprocal`, one per line."""
    with open(path, "w", encoding="utf-8") as f:
        for e in range(g.n_edges):
            kind = EdgeKind(g.kind[e]).name
            f.write(f"{g.i[e]} {g.j[e]} {float(g.weight[e])!r} {kind} {int(g.reciprocal[e])}\n")
