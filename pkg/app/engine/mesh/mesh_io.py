import logging
from pathlib import Path
from typing import List, Tuple

import numpy as np

from app.engine.mesh.schemas import SurfaceMesh, VolumeMesh
from app.exceptions.mesh_error import MeshError

SECTIONS = ('VERTICES', 'PANELS', 'NODES', 'CELLS', 'LINK')
NORMAL_TOLERANCE = 1e-12


def _format_row(values) -> str:
    return ' '.join(f'{v:.17g}' if isinstance(v, float) else str(v) for v in values)


def export_mesh(surface: SurfaceMesh, volume: VolumeMesh, path) -> None:
    path = Path(path)
    logging.info(f'Writing mesh to {path}')
    lines: List[str] = [f'VERTICES {surface.vertices.shape[0]}']
    lines += [_format_row(v.tolist()) for v in surface.vertices]
    lines.append(f'PANELS {surface.n_panels}')
    for p in range(surface.n_panels):
        lines.append(_format_row(
            surface.panels[p].tolist() + surface.centroids[p].tolist()
            + [float(surface.areas[p])] + surface.normals[p].tolist(),
        ))
    lines.append(f'NODES {volume.nodes.shape[0]}')
    lines += [_format_row(v.tolist()) for v in volume.nodes]
    lines.append(f'CELLS {volume.n_cells}')
    for c in range(volume.n_cells):
        lines.append(_format_row(
            volume.cells[c].tolist() + volume.barycenters[c].tolist() + [float(volume.volumes[c])],
        ))
    lines.append(f'LINK {volume.link.shape[0]}')
    lines += [_format_row(row.tolist()) for row in volume.link]
    path.write_text('\n'.join(lines) + '\n')


class _Reader:

    def __init__(self, text: str):
        self.lines = text.splitlines()
        self.position = 0

    def section(self, name: str) -> int:
        while self.position < len(self.lines) and not self.lines[self.position].strip():
            self.position += 1
        if self.position >= len(self.lines):
            raise MeshError(f'missing section {name}')
        header = self.lines[self.position].split()
        line_number = self.position + 1
        if len(header) != 2 or header[0] != name:
            raise MeshError(f'expected section header "{name} <count>"', line_number)
        try:
            count = int(header[1])
        except ValueError:
            raise MeshError(f'invalid count in section {name}', line_number)
        self.position += 1
        return count

    def rows(self, name: str, count: int, int_columns: int, float_columns: int) -> Tuple[np.ndarray, np.ndarray]:
        ints = np.empty((count, int_columns), dtype=np.int64)
        floats = np.empty((count, float_columns), dtype=float)
        for row in range(count):
            if self.position >= len(self.lines):
                raise MeshError(f'section {name} truncated: expected {count} rows, found {row}')
            line_number = self.position + 1
            fields = self.lines[self.position].split()
            if len(fields) != int_columns + float_columns:
                raise MeshError(
                    f'section {name}: expected {int_columns + float_columns} values, got {len(fields)}', line_number,
                )
            try:
                ints[row] = [int(v) for v in fields[:int_columns]]
                floats[row] = [float(v) for v in fields[int_columns:]]
            except ValueError:
                raise MeshError(f'section {name}: malformed number', line_number)
            self.position += 1
        return ints, floats


def import_mesh(path) -> Tuple[SurfaceMesh, VolumeMesh]:
    path = Path(path)
    logging.info(f'Reading mesh from {path}')
    reader = _Reader(path.read_text())

    n = reader.section('VERTICES')
    _, vertices = reader.rows('VERTICES', n, 0, 3)
    m = reader.section('PANELS')
    panel_start = reader.position
    panels, panel_data = reader.rows('PANELS', m, 3, 7)
    normals = panel_data[:, 4:7]
    bad = np.flatnonzero(np.abs(np.linalg.norm(normals, axis=1) - 1.0) > NORMAL_TOLERANCE)
    if bad.size:
        raise MeshError(f'panel {bad[0]} has a non-unit normal', panel_start + int(bad[0]) + 1)
    if panels.size and (panels.min() < 0 or panels.max() >= n):
        raise MeshError('panel references an unknown vertex')

    p = reader.section('NODES')
    _, nodes = reader.rows('NODES', p, 0, 3)
    q = reader.section('CELLS')
    cells, cell_data = reader.rows('CELLS', q, 4, 4)
    if cells.size and (cells.min() < 0 or cells.max() >= p):
        raise MeshError('cell references an unknown node')
    qb = reader.section('LINK')
    link, _ = reader.rows('LINK', qb, 3, 0)

    surface = SurfaceMesh(
        vertices=vertices,
        panels=panels,
        centroids=panel_data[:, 0:3],
        areas=panel_data[:, 3],
        normals=normals,
    )
    volume = VolumeMesh(
        nodes=nodes,
        cells=cells,
        barycenters=cell_data[:, 0:3],
        volumes=cell_data[:, 3],
        link=link,
    )
    return surface, volume
