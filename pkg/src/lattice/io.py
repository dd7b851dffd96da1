"""
io - Binary field snapshots.
Layout: a fixed header (magic, version, endianness tag, degree, n, per-axis shape, period)
followed by the raw (C(6,k), *shape) float64 array in multi-index-major order.
"""
import logging
import sys
from pathlib import Path

import numpy as np

from errors import ConfigError
from lattice.form_field import FormField
from lattice.grid import DIM, Grid

logger = logging.getLogger(__name__)

MAGIC = b"IIAF"
VERSION = 1

HEADER = np.dtype([
    ("magic", "S4"),
    ("version", "<u2"),
    ("endian", "S1"),
    ("degree", "u1"),
    ("n", "<u4"),
    ("shape", "<u4", (DIM,)),
    ("length", "<f8"),
])


def save_field(path, field):
    """Write a FormField snapshot; the payload keeps the machine byte order and says so in the header"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = np.zeros((), dtype=HEADER)
    header["magic"] = MAGIC
    header["version"] = VERSION
    header["endian"] = b"<" if sys.byteorder == "little" else b">"
    header["degree"] = field.degree
    header["n"] = field.grid.n
    header["shape"] = field.grid.shape
    header["length"] = field.grid.length
    with path.open("wb") as handle:
        handle.write(header.tobytes())
        handle.write(np.ascontiguousarray(field.values, dtype=float).tobytes())
    logger.debug("saved degree-%d snapshot to %s", field.degree, path)


def load_field(path):
    path = Path(path)
    raw = path.read_bytes()
    if len(raw) < HEADER.itemsize:
        raise ConfigError("snapshot is truncated", path=str(path))
    header = np.frombuffer(raw[:HEADER.itemsize], dtype=HEADER)[0]
    if bytes(header["magic"]) != MAGIC:
        raise ConfigError("not a field snapshot", path=str(path))
    if int(header["version"]) != VERSION:
        raise ConfigError("unsupported snapshot version", path=str(path), version=int(header["version"]))
    grid = Grid(int(header["n"]), float(header["length"]), tuple(int(size) for size in header["shape"]))
    degree = int(header["degree"])
    dtype = np.dtype(bytes(header["endian"]).decode() + "f8")
    payload = np.frombuffer(raw[HEADER.itemsize:], dtype=dtype)
    values = payload.astype(float).reshape((-1,) + grid.shape)
    return FormField(grid, values, degree)
