"""CSV and binary serialization of GridFunction and Sinogram.

CSV: ``#``-prefixed ``key=value`` metadata lines, one header row naming the
columns, then one sample per row.

Binary (little-endian throughout)::

    b"PBSG"  u32 version=1  u32 kind (1 grid, 2 sinogram)
    grid:     u32 n, f8[n] origin, f8[n] spacing, u32[n] shape, f8[2N] values (re, im interleaved)
    sinogram: u32 n, u32 M, u32 t_count, u32 parity (0 even_P, 1 signed_Ptilde, 2 odd),
              u32 degree, f8 t_min, f8 t_max, f8[M*n] directions, f8[M] weights,
              u32[M] antipode_index, f8[2*M*t_count] values
"""

import csv
import struct
from pathlib import Path

import numpy as np

from .grids import DirectionGrid, GridFunction, Parity, Sinogram

MAGIC = b"PBSG"
VERSION = 1
_PARITY_CODES = {Parity.EVEN_P: 0, Parity.SIGNED_PTILDE: 1, Parity.ODD: 2}
_PARITY_FROM_CODE = {v: k for k, v in _PARITY_CODES.items()}


def _fmt(v):
    return repr(float(v))


def _vec(a):
    return " ".join(_fmt(v) for v in np.ravel(a))


def write_csv(obj, path):
    """Write a GridFunction or Sinogram to ``path``."""
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            if isinstance(obj, GridFunction):
                fh.write("# kind=grid\n")
                fh.write(f"# n={obj.n}\n# origin={_vec(obj.origin)}\n# spacing={_vec(obj.spacing)}\n")
                fh.write(f"# shape={' '.join(str(s) for s in obj.shape)}\n")
                w.writerow([f"x{j}" for j in range(obj.n)] + ["re", "im"])
                pts = obj.points().reshape(-1, obj.n)
                for p, v in zip(pts, obj.values.ravel()):
                    w.writerow([_fmt(c) for c in p] + [_fmt(v.real), _fmt(v.imag)])
            elif isinstance(obj, Sinogram):
                d = obj.dirs
                fh.write("# kind=sinogram\n")
                fh.write(f"# n={obj.n}\n# t_min={_fmt(obj.t_min)}\n# t_max={_fmt(obj.t_max)}\n")
                fh.write(f"# t_count={obj.t_count}\n# parity={obj.parity.value}\n# degree={d.degree}\n")
                w.writerow(["dir"] + [f"omega{j}" for j in range(obj.n)] + ["weight", "antipode", "t", "re", "im"])
                t = obj.t
                for i in range(len(d)):
                    head = [str(i)] + [_fmt(c) for c in d.directions[i]] + [_fmt(d.weights[i]), str(d.antipode_index[i])]
                    for tj, v in zip(t, obj.values[i]):
                        w.writerow(head + [_fmt(tj), _fmt(v.real), _fmt(v.imag)])
            else:
                raise TypeError("expected a GridFunction or a Sinogram")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def read_csv(path):
    path = Path(path)
    meta = {}
    with path.open(newline="") as fh:
        lines = fh.read().splitlines()
    body = []
    for line in lines:
        if line.startswith("#"):
            key, _, val = line[1:].strip().partition("=")
            meta[key] = val
        elif line:
            body.append(line)
    rows = list(csv.reader(body))
    data = np.array(rows[1:], dtype=float) if len(rows) > 1 else np.zeros((0, len(rows[0])))
    n = int(meta["n"])
    vals = data[:, -2] + 1j * data[:, -1]
    if meta.get("kind") == "grid":
        origin = np.array(meta["origin"].split(), float)
        spacing = np.array(meta["spacing"].split(), float)
        shape = tuple(int(s) for s in meta["shape"].split())
        return GridFunction(n, origin, spacing, shape, vals.reshape(shape))
    if meta.get("kind") == "sinogram":
        tc = int(meta["t_count"])
        m = len(data) // tc
        first = data[::tc]
        dirs = DirectionGrid(n, first[:, 1:1 + n], first[:, 1 + n], first[:, 2 + n].astype(int), int(meta["degree"]))
        return Sinogram(dirs, float(meta["t_min"]), float(meta["t_max"]), tc, vals.reshape(m, tc),
                        Parity(meta["parity"]))
    raise ValueError(f"{path}: unknown kind {meta.get('kind')!r}")


def _c2f(values):
    v = np.asarray(values, complex).ravel()
    return np.stack([v.real, v.imag], axis=1).astype("<f8").tobytes()


def write_binary(obj, path):
    path = Path(path)
    parts = [MAGIC, struct.pack("<II", VERSION, 1 if isinstance(obj, GridFunction) else 2)]
    if isinstance(obj, GridFunction):
        parts += [struct.pack("<I", obj.n), obj.origin.astype("<f8").tobytes(), obj.spacing.astype("<f8").tobytes(),
                  np.asarray(obj.shape, "<u4").tobytes(), _c2f(obj.values)]
    elif isinstance(obj, Sinogram):
        d = obj.dirs
        parts += [struct.pack("<IIIII", obj.n, len(d), obj.t_count, _PARITY_CODES[obj.parity], d.degree),
                  struct.pack("<dd", obj.t_min, obj.t_max), d.directions.astype("<f8").tobytes(),
                  d.weights.astype("<f8").tobytes(), d.antipode_index.astype("<u4").tobytes(), _c2f(obj.values)]
    else:
        raise TypeError("expected a GridFunction or a Sinogram")
    try:
        path.write_bytes(b"".join(parts))
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


class _Reader:
    def __init__(self, buf):
        self.buf, self.pos = buf, 0

    def take(self, fmt):
        vals = struct.unpack_from(fmt, self.buf, self.pos)
        self.pos += struct.calcsize(fmt)
        return vals

    def array(self, dtype, count):
        a = np.frombuffer(self.buf, dtype=dtype, count=count, offset=self.pos)
        self.pos += a.nbytes
        return a

    def complex(self, count):
        a = self.array("<f8", 2 * count)
        return a[0::2] + 1j * a[1::2]


def read_binary(path):
    path = Path(path)
    buf = path.read_bytes()
    if buf[:4] != MAGIC:
        raise ValueError(f"{path}: bad magic {buf[:4]!r}")
    r = _Reader(buf)
    r.pos = 4
    version, kind = r.take("<II")
    if version != VERSION:
        raise ValueError(f"{path}: unsupported version {version}")
    if kind == 1:
        (n,) = r.take("<I")
        origin = r.array("<f8", n)
        spacing = r.array("<f8", n)
        shape = tuple(int(s) for s in r.array("<u4", n))
        return GridFunction(n, origin, spacing, shape, r.complex(int(np.prod(shape))).reshape(shape))
    if kind == 2:
        n, m, tc, pc, degree = r.take("<IIIII")
        t_min, t_max = r.take("<dd")
        dirs = DirectionGrid(n, r.array("<f8", m * n).reshape(m, n), r.array("<f8", m),
                             r.array("<u4", m).astype(int), degree)
        return Sinogram(dirs, t_min, t_max, tc, r.complex(m * tc).reshape(m, tc), _PARITY_FROM_CODE[pc])
    raise ValueError(f"{path}: unknown kind code {kind}")
