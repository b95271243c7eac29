import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from imd.errors import EmptyInput, NonFiniteValue, ParseError, SampleTooLarge
from imd.pointcloud import (
    PointCloud,
    load_pointcloud,
    save_pointcloud,
    subsample,
)


def test_csv_parse_trivial(tmp_path):
    p = tmp_path / "pts.csv"
    p.write_text("0,0\n1,0\n0,1\n")
    pc = load_pointcloud(p)
    assert (pc.n, pc.d) == (3, 2)
    assert np.array_equal(pc.data, [[0, 0], [1, 0], [0, 1]])


def test_csv_header_skipped(tmp_path):
    p = tmp_path / "pts.csv"
    p.write_text("x,y\n1,2\n3,4\n")
    pc = load_pointcloud(p, header=True)
    assert pc.n == 2
    with pytest.raises(ParseError):
        load_pointcloud(p)  # header row is not numeric


def test_csv_nan_rejected(tmp_path):
    p = tmp_path / "pts.csv"
    p.write_text("1,2\n3,nan\n")
    with pytest.raises(NonFiniteValue) as exc:
        load_pointcloud(p)
    assert exc.value.row == 1 and exc.value.col == 1


def test_csv_ragged_rejected(tmp_path):
    p = tmp_path / "pts.csv"
    p.write_text("1,2\n3\n")
    with pytest.raises(ParseError, match="ragged"):
        load_pointcloud(p)


def test_csv_bad_token_rejected(tmp_path):
    p = tmp_path / "pts.csv"
    p.write_text("1,2\n3,zebra\n")
    with pytest.raises(ParseError, match="zebra"):
        load_pointcloud(p)


def test_empty_rejected(tmp_path):
    p = tmp_path / "pts.csv"
    p.write_text("")
    with pytest.raises(EmptyInput):
        load_pointcloud(p)


def test_imdm_round_trip_header(tmp_path):
    p = tmp_path / "pts.imdm"
    pc = PointCloud(np.arange(6, dtype=np.float64).reshape(2, 3))
    save_pointcloud(pc, p)
    back = load_pointcloud(p)
    assert (back.n, back.d) == (2, 3)
    assert np.array_equal(back.data, pc.data)


def test_imdm_magic_and_truncation(tmp_path):
    p = tmp_path / "pts.imdm"
    p.write_bytes(b"NOPE" + bytes(20))
    with pytest.raises(ParseError, match="magic"):
        load_pointcloud(p)
    pc = PointCloud(np.ones((2, 2)))
    save_pointcloud(pc, p)
    raw = p.read_bytes()
    p.write_bytes(raw[:-4])
    with pytest.raises(ParseError, match="size"):
        load_pointcloud(p)


def test_format_autodetect_by_magic(tmp_path):
    p = tmp_path / "pts.dat"  # no helpful extension
    save_pointcloud(PointCloud(np.ones((3, 1))), p, format="imdm")
    assert load_pointcloud(p).n == 3


@settings(max_examples=30, deadline=None)
@given(
    st.lists(
        st.lists(
            st.floats(
                allow_nan=False,
                allow_infinity=False,
                min_value=-1e300,
                max_value=1e300,
            ),
            min_size=3,
            max_size=3,
        ),
        min_size=1,
        max_size=8,
    )
)
def test_round_trips_bit_exact(tmp_path_factory, rows):
    tmp = tmp_path_factory.mktemp("rt")
    pc = PointCloud(np.array(rows, dtype=np.float64))
    for fmt, name in (("csv", "a.csv"), ("imdm", "a.imdm")):
        path = tmp / name
        save_pointcloud(pc, path, format=fmt)
        back = load_pointcloud(path, format=fmt)
        assert back.data.tobytes() == pc.data.tobytes()


def test_subsample_full_is_permutation():
    pc = PointCloud(np.arange(10, dtype=np.float64).reshape(5, 2))
    sub = subsample(pc, 5, seed=123)
    assert sorted(map(tuple, sub.data)) == sorted(map(tuple, pc.data))


def test_subsample_deterministic():
    data = np.random.default_rng(0).normal(size=(1000, 3))
    pc = PointCloud(data)
    a = subsample(pc, 100, seed=7)
    b = subsample(pc, 100, seed=7)
    assert np.array_equal(a.data, b.data)
    c = subsample(pc, 100, seed=8)
    assert not np.array_equal(a.data, c.data)


def test_subsample_too_large():
    pc = PointCloud(np.ones((10, 2)))
    with pytest.raises(SampleTooLarge):
        subsample(pc, 11, seed=0)


def test_nonfinite_constructor():
    with pytest.raises(NonFiniteValue):
        PointCloud(np.array([[1.0, np.inf]]))


def test_float32_widened():
    pc = PointCloud(np.ones((2, 2), dtype=np.float32))
    assert pc.data.dtype == np.float64
