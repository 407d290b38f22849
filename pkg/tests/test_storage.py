import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hyperbargmann.grids import BoxSpec, Parity, make_direction_grid, sample, sample_sino
from hyperbargmann.storage import read_binary, read_csv, write_binary, write_csv


def _grid():
    return sample(lambda p: np.exp(-p[..., 0] ** 2) + 1j * p[..., 1], BoxSpec(2, 1.5, 5, (0.1, -0.2)))


def _sino(n=3, parity=Parity.EVEN_P):
    d = make_direction_grid(n, 4)
    return sample_sino(lambda o, t: np.exp(-t * t) * (1 + 0.5j * o[:, :1] ** 2), d, (-2.0, 2.0, 9), parity)


def _same_grid(a, b):
    return (a.n == b.n and a.shape == b.shape and np.array_equal(a.origin, b.origin)
            and np.array_equal(a.spacing, b.spacing) and np.array_equal(a.values, b.values))


def _same_sino(a, b):
    return (a.parity is b.parity and a.t_count == b.t_count and a.t_min == b.t_min and a.t_max == b.t_max
            and np.array_equal(a.dirs.directions, b.dirs.directions)
            and np.array_equal(a.dirs.weights, b.dirs.weights)
            and np.array_equal(a.dirs.antipode_index, b.dirs.antipode_index)
            and a.dirs.degree == b.dirs.degree and np.array_equal(a.values, b.values))


@pytest.mark.parametrize("writer,reader,suffix", [(write_csv, read_csv, ".csv"), (write_binary, read_binary, ".bin")])
def test_grid_round_trip_is_exact(tmp_path, writer, reader, suffix):
    g = _grid()
    path = tmp_path / ("g" + suffix)
    writer(g, path)
    assert _same_grid(reader(path), g)


@pytest.mark.parametrize("writer,reader,suffix", [(write_csv, read_csv, ".csv"), (write_binary, read_binary, ".bin")])
@pytest.mark.parametrize("parity", list(Parity))
def test_sinogram_round_trip_is_exact(tmp_path, writer, reader, suffix, parity):
    S = _sino(3, parity)
    path = tmp_path / ("s" + suffix)
    writer(S, path)
    assert _same_sino(reader(path), S)


@given(st.lists(st.complex_numbers(max_magnitude=1e300, allow_nan=False, allow_infinity=False),
                min_size=6, max_size=6))
def test_csv_preserves_arbitrary_doubles(tmp_path_factory, vals):
    path = tmp_path_factory.mktemp("csv") / "g.csv"
    g = _grid()
    g = type(g)(1, [0.0], [0.5], (6,), vals)
    write_csv(g, path)
    assert np.array_equal(read_csv(path).values, g.values)


def test_csv_layout(tmp_path):
    path = tmp_path / "s.csv"
    write_csv(_sino(2, Parity.SIGNED_PTILDE), path)
    lines = path.read_text().splitlines()
    assert lines[0] == "# kind=sinogram"
    header = [l for l in lines if not l.startswith("#")][0]
    assert header == "dir,omega0,omega1,weight,antipode,t,re,im"


def test_binary_header(tmp_path):
    path = tmp_path / "g.bin"
    write_binary(_grid(), path)
    raw = path.read_bytes()
    assert raw[:4] == b"PBSG"
    assert int.from_bytes(raw[4:8], "little") == 1 and int.from_bytes(raw[8:12], "little") == 1


def test_errors(tmp_path):
    bad = tmp_path / "bad.bin"
    bad.write_bytes(b"XXXX" + bytes(8))
    with pytest.raises(ValueError):
        read_binary(bad)
    with pytest.raises(TypeError):
        write_csv(object(), tmp_path / "x.csv")
    with pytest.raises(TypeError):
        write_binary(object(), tmp_path / "x.bin")
    with pytest.raises(OSError, match="nonexistent"):
        write_csv(_grid(), tmp_path / "nonexistent" / "g.csv")
