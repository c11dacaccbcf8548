import logging
from pathlib import Path
from typing import Union

import numpy as np

from app.engine.potentials.schemas import BoundaryDensity, DomainDensity, PotentialMatrix
from app.exceptions.assembly_error import AssemblyError

Density = Union[BoundaryDensity, DomainDensity, np.ndarray]

HEADER_DTYPE = np.dtype('<u8')
VALUE_DTYPE = np.dtype('<f8')


def apply(matrix: PotentialMatrix, density: Density) -> np.ndarray:
    if isinstance(density, (BoundaryDensity, DomainDensity)):
        values = density.values
    else:
        values = np.asarray(density, dtype=float)
    if values.ndim != 1 or values.shape[0] != matrix.n_sources:
        raise AssemblyError(
            f'{matrix.operator.value} has {matrix.n_sources} source elements, density has shape {values.shape}',
        )
    return matrix.values @ values


def dump_matrix(matrix: Union[PotentialMatrix, np.ndarray], path) -> None:
    """Two little-endian uint64 dimensions followed by the row-major little-endian float64 entries."""
    values = matrix.values if isinstance(matrix, PotentialMatrix) else np.asarray(matrix, dtype=float)
    if values.ndim != 2:
        raise AssemblyError(f'only 2-d matrices can be dumped, got shape {values.shape}')
    path = Path(path)
    logging.info(f'Dumping {values.shape[0]}x{values.shape[1]} matrix to {path}')
    with path.open('wb') as handle:
        handle.write(np.array(values.shape, dtype=HEADER_DTYPE).tobytes())
        handle.write(np.ascontiguousarray(values, dtype=VALUE_DTYPE).tobytes())


def load_matrix(path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if len(raw) < 2 * HEADER_DTYPE.itemsize:
        raise AssemblyError(f'{path}: file too short for a matrix header')
    rows, columns = (int(v) for v in np.frombuffer(raw[:16], dtype=HEADER_DTYPE))
    expected = 16 + rows * columns * VALUE_DTYPE.itemsize
    if len(raw) != expected:
        raise AssemblyError(f'{path}: expected {expected} bytes for a {rows}x{columns} matrix, found {len(raw)}')
    return np.frombuffer(raw[16:], dtype=VALUE_DTYPE).reshape(rows, columns).astype(float)
