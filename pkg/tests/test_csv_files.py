import numpy as np
import pytest
from numpy.testing import assert_array_equal

from src.errors import FileFormatError
from src.ingestion.csv_files import (
    read_edge_list,
    read_matrix,
    read_state_vector,
    read_vector,
    write_matrix,
    write_ranking,
    write_state_vector,
    write_trace,
)


def test_read_matrix_fixture(fixtures_dir):
    assert_array_equal(read_matrix(fixtures_dir / "cycle2.csv"), [[0, 1], [1, 0]])


def test_matrix_values_survive_a_write(tmp_path):
    m = np.random.default_rng(0).uniform(size=(4, 4))
    path = tmp_path / "m.csv"
    write_matrix(path, m)
    assert_array_equal(read_matrix(path), m)
    raw = path.read_bytes()
    assert b"\r" not in raw
    assert raw.count(b"\n") == 4


def test_ragged_and_non_numeric_rows(tmp_path):
    ragged = tmp_path / "ragged.csv"
    ragged.write_text("0.5,0.5\n1\n")
    with pytest.raises(FileFormatError):
        read_matrix(ragged)
    words = tmp_path / "words.csv"
    words.write_text("a,b\nc,d\n")
    with pytest.raises(FileFormatError):
        read_matrix(words)
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    with pytest.raises(FileFormatError):
        read_matrix(empty)


def test_missing_file_is_os_error(tmp_path):
    with pytest.raises(OSError):
        read_matrix(tmp_path / "absent.csv")


def test_read_vector(tmp_path):
    path = tmp_path / "p.csv"
    path.write_text("0.25\n0.75\n")
    assert_array_equal(read_vector(path), [0.25, 0.75])
    path.write_text("0.25,1\n0.75,1\n")
    with pytest.raises(FileFormatError):
        read_vector(path)


def test_state_vector(tmp_path):
    path = tmp_path / "state.csv"
    v = np.array([0.5, 0.5j, -0.5, 0.5 - 0j])
    write_state_vector(path, v)
    assert_array_equal(read_state_vector(path), v)
    path.write_text("1,0\n0,0\n0,0\n")
    with pytest.raises(FileFormatError):
        read_state_vector(path)


def test_edge_list(tmp_path):
    path = tmp_path / "edges.csv"
    path.write_text("0,2,0.5\n0,1\n1,2\n2,0\n")
    adjacency = read_edge_list(path)
    expected = np.zeros((3, 3))
    expected[1, 0] = 1.0
    expected[2, 1] = 1.0
    expected[0, 2] = 1.0
    expected[2, 0] = 0.5
    assert_array_equal(adjacency, expected)
    assert read_edge_list(path, n=5).shape == (5, 5)
    with pytest.raises(FileFormatError):
        read_edge_list(path, n=2)


def test_edge_list_rejects_bad_indices(tmp_path):
    path = tmp_path / "edges.csv"
    path.write_text("0,1.5\n")
    with pytest.raises(FileFormatError):
        read_edge_list(path)
    path.write_text("0,-1\n")
    with pytest.raises(FileFormatError):
        read_edge_list(path)


def test_trace_has_no_header(tmp_path):
    path = tmp_path / "trace.csv"
    write_trace(path, np.full((3, 2), 0.5))
    assert path.read_text() == "0.5,0.5\n0.5,0.5\n0.5,0.5\n"


def test_ranking_files(tmp_path):
    path = tmp_path / "rank.csv"
    write_ranking(path, np.array([0.2, 0.5, 0.3]))
    assert path.read_text() == "node_index,score\n0,0.2\n1,0.5\n2,0.3\n"
    write_ranking(path, np.array([0.2, 0.4, 0.4]), by_score=True)
    assert path.read_text() == "node_index,score\n1,0.4\n2,0.4\n0,0.2\n"
