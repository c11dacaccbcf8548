from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

import numpy as np

from app.engine.mesh.schemas import SurfaceMesh, VolumeMesh


class OperatorId(str, Enum):
    V = 'V'
    W = 'W'
    CAL_V = 'calV'
    CAL_W = 'calW'
    CAL_W_PRIME = 'calWprime'
    P = 'P'
    R = 'R'


class AssemblyPath(str, Enum):
    DIRECT = 'direct'
    RELATION = 'relation'


class ParametrixKind(str, Enum):
    X = 'x'
    Y = 'y'


@dataclass(frozen=True)
class BoundaryDensity:
    """Piecewise-constant density, one value per surface panel."""
    values: np.ndarray

    @classmethod
    def sample(cls, surface: SurfaceMesh, fn: Callable[[np.ndarray], np.ndarray]):
        return cls(values=np.asarray(fn(surface.centroids), dtype=float).reshape(surface.n_panels))

    @classmethod
    def constant(cls, surface: SurfaceMesh, value: float = 1.0):
        return cls(values=np.full(surface.n_panels, float(value)))


@dataclass(frozen=True)
class DomainDensity:
    """Piecewise-constant density, one value per volume cell."""
    values: np.ndarray

    @classmethod
    def sample(cls, volume: VolumeMesh, fn: Callable[[np.ndarray], np.ndarray]):
        return cls(values=np.asarray(fn(volume.barycenters), dtype=float).reshape(volume.n_cells))

    @classmethod
    def constant(cls, volume: VolumeMesh, value: float = 1.0):
        return cls(values=np.full(volume.n_cells, float(value)))


@dataclass(frozen=True)
class TargetSet:
    """
    Collocation points of a matrix.

    panel_of[t] is the panel whose centroid target t is (-1 otherwise), cell_of[t] likewise for barycenters.
    normals are only needed by operators that differentiate in the target variable.
    """
    points: np.ndarray
    normals: Optional[np.ndarray]
    panel_of: np.ndarray
    cell_of: np.ndarray
    label: str

    @classmethod
    def centroids(cls, surface: SurfaceMesh):
        n = surface.n_panels
        return cls(
            points=surface.centroids,
            normals=surface.normals,
            panel_of=np.arange(n),
            cell_of=np.full(n, -1),
            label='centroids',
        )

    @classmethod
    def barycenters(cls, volume: VolumeMesh, cells: Optional[np.ndarray] = None):
        cells = np.arange(volume.n_cells) if cells is None else np.asarray(cells, dtype=np.int64)
        return cls(
            points=volume.barycenters[cells],
            normals=None,
            panel_of=np.full(cells.size, -1),
            cell_of=cells,
            label='barycenters',
        )

    @classmethod
    def from_points(cls, points, normals=None, label: str = 'points'):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        return cls(
            points=points,
            normals=None if normals is None else np.atleast_2d(np.asarray(normals, dtype=float)),
            panel_of=np.full(points.shape[0], -1),
            cell_of=np.full(points.shape[0], -1),
            label=label,
        )

    @property
    def size(self) -> int:
        return int(self.points.shape[0])


@dataclass(frozen=True)
class PotentialMatrix:
    values: np.ndarray
    operator: OperatorId
    path: AssemblyPath
    targets: str
    parametrix: ParametrixKind = ParametrixKind.X

    @property
    def n_targets(self) -> int:
        return int(self.values.shape[0])

    @property
    def n_sources(self) -> int:
        return int(self.values.shape[1])
