from dataclasses import dataclass
from enum import Enum
from typing import Tuple

import numpy as np
from pydantic import BaseModel, validator

from app.engine.coefficient.schemas import BoundingBox


class GeometryKind(str, Enum):
    BALL = 'ball'
    CUBE = 'cube'


class DomainGeometry(BaseModel):
    kind: GeometryKind
    size: float = 1.0  # radius for the ball, half-width for the cube
    center: Tuple[float, float, float] = (0.0, 0.0, 0.0)

    class Config:
        allow_mutation = False
        extra = 'forbid'

    @validator('size')
    def check_size(cls, value):
        if value <= 0:
            raise ValueError('radius/half-width must be positive')
        return value

    @property
    def diameter(self) -> float:
        if self.kind == GeometryKind.BALL:
            return 2.0 * self.size
        return 2.0 * np.sqrt(3.0) * self.size

    def bounding_box(self) -> BoundingBox:
        return BoundingBox.cube(self.size, self.center)

    def distance_to_boundary(self, points) -> np.ndarray:
        """Signed distance to the boundary, positive inside."""
        p = np.asarray(points, dtype=float) - np.asarray(self.center)
        if self.kind == GeometryKind.BALL:
            return self.size - np.linalg.norm(p, axis=-1)
        return self.size - np.max(np.abs(p), axis=-1)


@dataclass(frozen=True)
class SurfaceMesh:
    vertices: np.ndarray
    panels: np.ndarray
    centroids: np.ndarray
    areas: np.ndarray
    normals: np.ndarray

    @classmethod
    def from_panels(cls, vertices: np.ndarray, panels: np.ndarray):
        corners = vertices[panels]
        cross = np.cross(corners[:, 1] - corners[:, 0], corners[:, 2] - corners[:, 0])
        doubled = np.linalg.norm(cross, axis=1)
        with np.errstate(invalid='ignore', divide='ignore'):
            normals = cross / doubled[:, None]
        return cls(
            vertices=vertices,
            panels=panels.astype(np.int64),
            centroids=corners.mean(axis=1),
            areas=0.5 * doubled,
            normals=normals,
        )

    @property
    def n_panels(self) -> int:
        return int(self.panels.shape[0])

    @property
    def corners(self) -> np.ndarray:
        return self.vertices[self.panels]

    @property
    def diameters(self) -> np.ndarray:
        return _max_edge(self.corners)

    @property
    def total_area(self) -> float:
        return float(self.areas.sum())


@dataclass(frozen=True)
class VolumeMesh:
    """
    Tetrahedral decomposition of the domain.

    link rows are (cell, local face, panel); local face i is the face opposite vertex i of the cell.
    """
    nodes: np.ndarray
    cells: np.ndarray
    barycenters: np.ndarray
    volumes: np.ndarray
    link: np.ndarray

    @classmethod
    def from_cells(cls, nodes: np.ndarray, cells: np.ndarray, link: np.ndarray):
        corners = nodes[cells]
        return cls(
            nodes=nodes,
            cells=cells.astype(np.int64),
            barycenters=corners.mean(axis=1),
            volumes=signed_volumes(corners),
            link=link.astype(np.int64),
        )

    @property
    def n_cells(self) -> int:
        return int(self.cells.shape[0])

    @property
    def corners(self) -> np.ndarray:
        return self.nodes[self.cells]

    @property
    def diameters(self) -> np.ndarray:
        return _max_edge(self.corners)

    @property
    def total_volume(self) -> float:
        return float(self.volumes.sum())

    def face_nodes(self, cell: int, local_face: int) -> np.ndarray:
        return np.delete(self.cells[cell], local_face)


def signed_volumes(corners: np.ndarray) -> np.ndarray:
    e1 = corners[..., 1, :] - corners[..., 0, :]
    e2 = corners[..., 2, :] - corners[..., 0, :]
    e3 = corners[..., 3, :] - corners[..., 0, :]
    return np.einsum('...i,...i->...', np.cross(e1, e2), e3) / 6.0


def _max_edge(corners: np.ndarray) -> np.ndarray:
    k = corners.shape[-2]
    lengths = [
        np.linalg.norm(corners[..., i, :] - corners[..., j, :], axis=-1)
        for i in range(k) for j in range(i + 1, k)
    ]
    return np.max(np.stack(lengths, axis=-1), axis=-1)
