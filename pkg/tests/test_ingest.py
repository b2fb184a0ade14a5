import numpy as np
import pytest

from hcr.errors import ConfigError, PairingError, ParseError
from hcr.ingest import PairedSample, SampleMatrix, load_joint, load_paired


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_load_paired_single_columns(tmp_path):
    px = write(tmp_path, "x.csv", "1\n2\n3\n")
    py = write(tmp_path, "y.csv", "4\n5\n6\n")
    pair = load_paired(px, py, "csv")
    assert pair.n == 3
    assert pair.x.d == pair.y.d == 1
    np.testing.assert_array_equal(pair.y.values[:, 0], [4, 5, 6])


def test_row_mismatch(tmp_path):
    px = write(tmp_path, "x.csv", "1\n2\n3\n")
    py = write(tmp_path, "y.csv", "4\n5\n6\n7\n")
    with pytest.raises(PairingError):
        load_paired(px, py)


def test_nan_rejected(tmp_path):
    px = write(tmp_path, "x.csv", "1\nNaN\n3\n")
    py = write(tmp_path, "y.csv", "4\n5\n6\n")
    with pytest.raises(ValueError):
        load_paired(px, py)


def test_non_numeric_cell_reports_position(tmp_path):
    px = write(tmp_path, "x.csv", "a,b\n1,2\n3,oops\n")
    py = write(tmp_path, "y.csv", "4\n5\n")
    with pytest.raises(ParseError) as err:
        load_paired(px, py)
    assert (err.value.row, err.value.col) == (3, 2)


def test_header_detected_and_tsv(tmp_path):
    px = write(tmp_path, "x.tsv", "u\tv\n1\t2\n3\t4\n")
    py = write(tmp_path, "y.tsv", "w\n5\n6\n")
    pair = load_paired(px, py, "tsv")
    assert pair.x.column_names == ("u", "v")
    assert pair.x.values.tolist() == [[1, 2], [3, 4]]


@pytest.mark.parametrize("split, dx, dy", [(2, 2, 2), (1, 1, 3)])
def test_load_joint_partition(tmp_path, split, dx, dy):
    p = write(tmp_path, "j.csv", "1,2,3,4\n5,6,7,8\n9,10,11,12\n")
    pair = load_joint(p, split)
    assert (pair.x.d, pair.y.d) == (dx, dy)


@pytest.mark.parametrize("split", [0, 4, 7])
def test_load_joint_split_out_of_range(tmp_path, split):
    p = write(tmp_path, "j.csv", "1,2,3,4\n5,6,7,8\n")
    with pytest.raises(ConfigError):
        load_joint(p, split)


def test_load_joint_roundtrip(tmp_path, rng):
    table = np.round(rng.standard_normal((25, 5)), 9)
    text = "\n".join(",".join(repr(float(v)) for v in row) for row in table)
    p = write(tmp_path, "j.csv", text)
    pair = load_joint(p, 3)
    np.testing.assert_array_equal(pair.joint(), table)


def test_sample_matrix_invariants():
    with pytest.raises(ValueError):
        SampleMatrix(np.array([[1.0]]))
    with pytest.raises(ValueError):
        SampleMatrix(np.array([[1.0], [np.inf]]))
    with pytest.raises(PairingError):
        PairedSample(SampleMatrix(np.zeros((3, 1))), SampleMatrix(np.zeros((4, 1))))


def test_sample_matrix_is_read_only():
    s = SampleMatrix(np.arange(4.0))
    with pytest.raises(ValueError):
        s.values[0, 0] = 7.0
