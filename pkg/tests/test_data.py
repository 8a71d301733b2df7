"""CSV input/output helpers and the toy dataset generators."""

import numpy as np
import pytest

from qgk.data import (
    format_float,
    read_csv,
    two_moons,
    write_matrix_csv,
    write_table_csv,
    xor_dataset,
)


def test_read_csv_unlabeled(tmp_path):
    path = tmp_path / "points.csv"
    path.write_text("1.5,2\n-0.25,3e-2\n")
    vectors, labels = read_csv(path)
    assert labels is None
    assert vectors.tolist() == [[1.5, 2.0], [-0.25, 0.03]]


def test_read_csv_labeled_with_header_and_blanks(tmp_path):
    path = tmp_path / "train.csv"
    path.write_text("x0,x1,label\n1,0,1\n\n0,1,-1\n  , \n")
    vectors, labels = read_csv(path, labeled=True, has_header=True)
    assert vectors.tolist() == [[1.0, 0.0], [0.0, 1.0]]
    assert labels.tolist() == [1, -1]
    assert labels.dtype == np.int64


def test_read_csv_error_messages_carry_line_numbers(tmp_path):
    bad_field = tmp_path / "bad.csv"
    bad_field.write_text("1,2\n3,oops\n")
    with pytest.raises(ValueError, match="bad.csv:2"):
        read_csv(bad_field)

    bad_label = tmp_path / "label.csv"
    bad_label.write_text("1,2,0.5\n")
    with pytest.raises(ValueError, match="label 0.5"):
        read_csv(bad_label, labeled=True)

    ragged = tmp_path / "ragged.csv"
    ragged.write_text("1,2\n3\n")
    with pytest.raises(ValueError, match="ragged"):
        read_csv(ragged)

    empty = tmp_path / "empty.csv"
    empty.write_text("\n")
    with pytest.raises(ValueError, match="no data rows"):
        read_csv(empty)


@pytest.mark.parametrize(
    "x", [0.0, 1.0, -2.5, 1.0 / 3.0, 1e-300, 6.02e23, np.pi]
)
def test_format_float_round_trips(x):
    assert float(format_float(x)) == x


def test_write_matrix_csv_round_trip(tmp_path):
    path = tmp_path / "matrix.csv"
    matrix = np.array([[1.0, 1.0 / 3.0], [np.pi, -2e-7]])
    write_matrix_csv(path, matrix, comments=["a gram matrix", "sigma=0.8"])
    text = path.read_text()
    assert text.startswith("# a gram matrix\n# sigma=0.8\n")
    data_lines = [l for l in text.splitlines() if not l.startswith("#")]
    parsed = np.array([[float(c) for c in l.split(",")] for l in data_lines])
    assert np.array_equal(parsed, matrix)


def test_write_table_csv_formats_cells(tmp_path):
    path = tmp_path / "table.csv"
    write_table_csv(
        path,
        ["label", "shots", "rmse", "match"],
        [["dot", 100, 0.125, True], ["z", 1000, 1.0 / 3.0, False]],
    )
    lines = path.read_text().splitlines()
    assert lines[0] == "label,shots,rmse,match"
    assert lines[1] == "dot,100,0.125,true"
    assert lines[2].startswith("z,1000,0.3333333333333333")
    assert lines[2].endswith(",false")


def test_xor_dataset_layout():
    data = xor_dataset()
    assert data.m == 4
    assert data.vectors.tolist() == [
        [1.0, 1.0],
        [1.0, -1.0],
        [-1.0, 1.0],
        [-1.0, -1.0],
    ]
    # Label is the sign of the coordinate product.
    for x, y in zip(data.vectors, data.labels):
        assert y == (1 if x[0] * x[1] > 0 else -1)


def test_two_moons_balance_and_interleave():
    data = two_moons(n=60, noise=0.1, seed=1)
    assert data.m == 60
    assert np.sum(data.labels == 1) == 30
    assert np.all(data.labels[0::2] == 1)
    assert np.all(data.labels[1::2] == -1)


def test_two_moons_odd_n():
    data = two_moons(n=7, noise=0.05, seed=2)
    assert data.m == 7
    assert np.sum(data.labels == 1) == 4
    assert np.sum(data.labels == -1) == 3
    assert np.all(np.isfinite(data.vectors))


def test_two_moons_deterministic_and_separated():
    a = two_moons(n=40, noise=0.05, seed=9)
    b = two_moons(n=40, noise=0.05, seed=9)
    assert np.array_equal(a.vectors, b.vectors)
    c = two_moons(n=40, noise=0.05, seed=10)
    assert not np.array_equal(a.vectors, c.vectors)
    # Noise-free moons never overlap: upper arc has y >= 0, lower y <= 0.5.
    clean = two_moons(n=200, noise=1e-9, seed=3)
    upper = clean.vectors[clean.labels == 1]
    lower = clean.vectors[clean.labels == -1]
    assert upper[:, 1].min() > -1e-6
    assert lower[:, 1].max() < 0.5 + 1e-6


def test_two_moons_rejects_tiny_n():
    with pytest.raises(ValueError):
        two_moons(n=3)
