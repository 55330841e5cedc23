import numpy as np
import pytest

from pknng import PointSet, build_knn_graph
from pknng.io import (
    dump_graph_edges,
    load_matrix,
    load_matrix_csv,
    load_points_csv,
    save_assignment_csv,
    save_matrix,
    save_matrix_csv,
    save_points_csv,
)


def test_points_csv_roundtrip_with_labels(tmp_path):
    rng = np.random.default_rng(1)
    ps = PointSet(points=rng.normal(size=(12, 3)), labels=np.array([0, 1, 2] * 4))
    path = tmp_path / "pts.csv"
    save_points_csv(ps, path)
    header = path.read_text().splitlines()[0]
    assert header == "x0,x1,x2,label"
    back = load_points_csv(path)
    assert np.array_equal(back.points, ps.points)
    assert np.array_equal(back.labels, ps.labels)


def test_points_csv_roundtrip_without_labels(tmp_path):
    ps = PointSet(points=[[1.5, -2.25], [0.125, 3.0]])
    path = tmp_path / "pts.csv"
    save_points_csv(ps, path)
    back = load_points_csv(path)
    assert back.labels is None
    assert np.array_equal(back.points, ps.points)


def test_points_csv_remaps_arbitrary_label_symbols(tmp_path):
    path = tmp_path / "pts.csv"
    path.write_text("x0,x1,label\n0.0,0.0,cat\n1.0,0.0,dog\n2.0,0.0,cat\n")
    ps = load_points_csv(path)
    assert ps.labels.tolist() == [0, 1, 0]


def test_points_csv_rejects_empty(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("")
    with pytest.raises(ValueError):
        load_points_csv(path)
    path.write_text("x0\n")
    with pytest.raises(ValueError, match="no data"):
        load_points_csv(path)


def test_matrix_binary_roundtrip(tmp_path):
    rng = np.random.default_rng(2)
    d = rng.uniform(size=(9, 9))
    path = tmp_path / "m.bin"
    save_matrix(d, path)
    assert np.array_equal(load_matrix(path), d)


def test_matrix_bad_magic(tmp_path):
    path = tmp_path / "m.bin"
    path.write_bytes(b"NOTAMTRX" + b"\x00" * 16)
    with pytest.raises(ValueError, match="magic"):
        load_matrix(path)


def test_matrix_truncated(tmp_path):
    d = np.zeros((4, 4))
    path = tmp_path / "m.bin"
    save_matrix(d, path)
    path.write_bytes(path.read_bytes()[:-8])
    with pytest.raises(ValueError, match="expected"):
        load_matrix(path)


def test_matrix_csv_roundtrip(tmp_path):
    d = np.random.default_rng(3).uniform(size=(5, 5))
    path = tmp_path / "m.csv"
    save_matrix_csv(d, path)
    assert np.allclose(load_matrix_csv(path), d, atol=1e-15)


def test_assignment_csv(tmp_path):
    path = tmp_path / "labels.csv"
    save_assignment_csv(np.array([2, 0, 1]), path)
    assert path.read_text().splitlines() == [
        "point_index,cluster_id", "0,2", "1,0", "2,1"]


def test_graph_dump_format(tmp_path):
    g = build_knn_graph([[0.0], [1.0], [3.0]], k=1)
    path = tmp_path / "g.txt"
    dump_graph_edges(g, path)
    lines = path.read_text().splitlines()
    assert len(lines) == g.n_edges
    first = lines[0].split()
    assert len(first) == 5
    assert first[0] == "0" and first[1] == "1"
    assert float(first[2]) == 1.0
    assert first[3] == "ORIGINAL"
    assert first[4] in {"0", "1"}
