import numpy as np
import pytest

from heatgraph import io
from heatgraph.errors import ConfigError
from heatgraph.graphs import generate_rbf_graph


def test_matrix_csv_round_trip_full_precision(tmp_path):
    rng = np.random.default_rng(0)
    a = rng.standard_normal((7, 5)) * 10.0 ** rng.integers(-12, 12, size=(7, 5))
    path = tmp_path / "m.csv"
    io.save_matrix_csv(path, a)
    assert np.array_equal(io.load_matrix_csv(path), a)


def test_matrix_csv_single_row_stays_2d(tmp_path):
    path = tmp_path / "row.csv"
    io.save_matrix_csv(path, np.array([[1.0, 2.0, 3.0]]))
    out = io.load_matrix_csv(path)
    assert out.shape == (1, 3)


def test_matrix_csv_malformed(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("1.0,2.0\n3.0,not_a_number\n")
    with pytest.raises(ConfigError):
        io.load_matrix_csv(path)


def test_edge_list_round_trip(tmp_path):
    w = generate_rbf_graph(12, rng_seed=1)
    path = tmp_path / "edges.csv"
    io.save_edge_list_csv(path, w)
    header = path.read_text().splitlines()[0]
    assert header == "src,dst,weight"
    assert np.array_equal(io.load_edge_list_csv(path, n=12), w)


def test_edge_list_rows_are_upper_triangular(tmp_path):
    w = generate_rbf_graph(8, rng_seed=2)
    path = tmp_path / "edges.csv"
    io.save_edge_list_csv(path, w)
    lines = path.read_text().splitlines()[1:]
    assert len(lines) == np.count_nonzero(w) // 2
    for line in lines:
        i, j, _ = line.split(",")
        assert int(i) < int(j)


def test_manifest_contents(tmp_path):
    io.write_manifest(tmp_path, "generate", {"n": 5}, [3, 4])
    m = io.load_json(tmp_path / "manifest.json")
    assert m["command"] == "generate"
    assert m["config"] == {"n": 5}
    assert m["seeds"] == [3, 4]
    assert "version" in m
