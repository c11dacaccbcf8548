from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, validator

from app.engine.coefficient.schemas import CoefficientField
from app.engine.mesh.schemas import DomainGeometry, SurfaceMesh, VolumeMesh
from app.engine.potentials.schemas import BoundaryDensity, DomainDensity
from app.engine.quadrature.schemas import SingularPolicy


class RightHandSideKind(str, Enum):
    DENSITY = 'density'
    POINT_SOURCES = 'point_sources'


class SolveMethod(str, Enum):
    DIRECT_LU = 'direct_lu'
    ITERATIVE = 'iterative'


class PointSource(BaseModel):
    location: Tuple[float, float, float]
    strength: float = 1.0

    class Config:
        allow_mutation = False
        extra = 'forbid'


@dataclass(frozen=True)
class RightHandSide:
    """f sampled at barycenters (zero extension outside the domain) or a sum of Dirac masses."""
    kind: RightHandSideKind
    density: Optional[DomainDensity] = None
    sources: Tuple[PointSource, ...] = ()

    @classmethod
    def zero(cls, volume: VolumeMesh):
        return cls(kind=RightHandSideKind.DENSITY, density=DomainDensity.constant(volume, 0.0))

    @classmethod
    def from_function(cls, volume: VolumeMesh, fn):
        return cls(kind=RightHandSideKind.DENSITY, density=DomainDensity.sample(volume, fn))

    @classmethod
    def point_sources(cls, sources):
        return cls(kind=RightHandSideKind.POINT_SOURCES, sources=tuple(sources))

    @property
    def is_zero(self) -> bool:
        if self.kind == RightHandSideKind.POINT_SOURCES:
            return all(source.strength == 0.0 for source in self.sources)
        return self.density is None or not np.any(self.density.values)


@dataclass(frozen=True)
class DirichletProblem:
    geometry: DomainGeometry
    field: CoefficientField
    rhs: RightHandSide
    dirichlet: BoundaryDensity
    surface: SurfaceMesh
    volume: VolumeMesh
    policy: SingularPolicy = field(default_factory=SingularPolicy)
    refinement: int = 0

    @property
    def h(self) -> float:
        return float(self.surface.diameters.max())

    @property
    def n_unknowns(self) -> int:
        return self.volume.n_cells + self.surface.n_panels


@dataclass(frozen=True)
class BdieSystem:
    """[[I + R, -V], [gamma R, -calV]] (u, psi) = [F0, gamma F0 - phi0]."""
    matrix: np.ndarray
    rhs: np.ndarray
    n_cells: int
    n_panels: int
    warnings: Tuple[str, ...] = ()

    @property
    def size(self) -> int:
        return self.n_cells + self.n_panels

    def block(self, row: int, column: int) -> np.ndarray:
        rows = slice(0, self.n_cells) if row == 0 else slice(self.n_cells, self.size)
        columns = slice(0, self.n_cells) if column == 0 else slice(self.n_cells, self.size)
        return self.matrix[rows, columns]


class SolverDiagnostics(BaseModel):
    method: SolveMethod
    residual_norm: float
    tolerance: float
    condition_estimate: Optional[float] = None
    iterations: Optional[int] = None

    class Config:
        allow_mutation = False

    @validator('condition_estimate')
    def finite_or_none(cls, value):
        if value is not None and not np.isfinite(value):
            return None
        return value


@dataclass(frozen=True)
class Solution:
    u: DomainDensity
    psi: BoundaryDensity
    diagnostics: SolverDiagnostics
    warnings: Tuple[str, ...] = field(default_factory=tuple)

    @property
    def vector(self) -> np.ndarray:
        return np.concatenate([self.u.values, self.psi.values])
