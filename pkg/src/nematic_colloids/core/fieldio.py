"""
Field dumps, CSV slices and energy traces.

Binary layout (little endian):

    magic      4 bytes   b"QTF1"
    dims       3 x uint32  nx, ny, nz
    lower      3 x float64 box corner
    spacing    3 x float64 grid spacing per axis
    basis_id   uint32    coefficient basis convention
    payload    nx*ny*nz*5 x float64, C order over (i, j, k, component)
"""
from __future__ import annotations

import csv
import logging
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence, Tuple, Union

import numpy as np

from .qtensor import BASIS_ID
from .solver import Box, GridSpec, TensorField

logger = logging.getLogger("nematic-colloids.fieldio")

MAGIC = b"QTF1"
HEADER = struct.Struct("<4s3I3d3dI")
FLOAT_FORMAT = "%.12e"

PathLike = Union[str, Path]


@dataclass(frozen=True)
class FieldDump:
    """Contents of a field dump: the grid it lives on and the node coefficients."""

    grid: GridSpec
    values: np.ndarray
    basis_id: int


def write_field(field: TensorField, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    grid = field.grid
    header = HEADER.pack(MAGIC, *grid.shape, *grid.box.lower, *grid.spacing, BASIS_ID)
    with path.open("wb") as handle:
        handle.write(header)
        handle.write(np.ascontiguousarray(field.values, dtype="<f8").tobytes(order="C"))
    logger.debug("wrote field dump %s", path)
    return path


def read_field(path: PathLike) -> FieldDump:
    """Read a dump written by `write_field`.

    Raises:
        ValueError: On a bad magic, an unknown basis or a truncated payload
    """
    data = Path(path).read_bytes()
    if len(data) < HEADER.size:
        raise ValueError(f"{path}: file too short for a field dump header")
    magic, nx, ny, nz, *rest = HEADER.unpack_from(data)
    if magic != MAGIC:
        raise ValueError(f"{path}: not a field dump (magic {magic!r})")
    lower, spacing, basis_id = rest[0:3], rest[3:6], rest[6]
    if basis_id != BASIS_ID:
        raise ValueError(f"{path}: unsupported coefficient basis {basis_id}")
    shape = (nx, ny, nz)
    expected = int(np.prod(shape)) * 5 * 8
    payload = data[HEADER.size :]
    if len(payload) != expected:
        raise ValueError(f"{path}: payload has {len(payload)} bytes, expected {expected}")
    upper = tuple(l + s * (n - 1) for l, s, n in zip(lower, spacing, shape))
    grid = GridSpec(Box(tuple(lower), upper), shape)
    values = np.frombuffer(payload, dtype="<f8").reshape(shape + (5,)).astype(float)
    return FieldDump(grid=grid, values=values, basis_id=basis_id)


def write_slice_csv(field: TensorField, path: PathLike, axis: int = 2, index: int = -1) -> Path:
    """Write one grid plane as rows x, y, z, q1..q5; the default is the middle plane."""
    if axis not in (0, 1, 2):
        raise ValueError(f"slice axis must be 0, 1 or 2, got {axis}")
    n = field.grid.shape[axis]
    index = n // 2 if index < 0 else index
    if not 0 <= index < n:
        raise ValueError(f"slice index {index} outside 0..{n - 1}")
    coords = np.take(field.grid.coordinates(), index, axis=axis).reshape(-1, 3)
    values = np.take(field.values, index, axis=axis).reshape(-1, 5)
    rows = np.hstack([coords, values])
    return _write_rows(path, ["x", "y", "z", "q1", "q2", "q3", "q4", "q5"], rows)


def write_energy_trace(trace: Sequence[float], path: PathLike) -> Path:
    rows = [(i, value) for i, value in enumerate(trace)]
    return _write_rows(path, ["iteration", "energy"], rows)


def format_float(value: float) -> str:
    return FLOAT_FORMAT % value


def _write_rows(path: PathLike, header: Sequence[str], rows: Iterable[Tuple]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(
                [v if isinstance(v, (str, int, np.integer)) else format_float(float(v)) for v in row]
            )
    return path
