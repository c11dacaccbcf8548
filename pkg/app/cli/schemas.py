from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field, root_validator, validator

from app.engine.bdie.schemas import PointSource, SolveMethod
from app.engine.bdie.solve import DEFAULT_TOLERANCE
from app.engine.coefficient.schemas import CoefficientFamily, CoefficientField
from app.engine.mesh.builders import MAX_BALL_REFINEMENT, MAX_CUBE_DIVISIONS
from app.engine.mesh.schemas import DomainGeometry, GeometryKind
from app.engine.quadrature.schemas import SingularPolicy
from app.engine.verification.cases import builtin_cases


class Frozen(BaseModel):

    class Config:
        allow_mutation = False
        extra = 'forbid'


def level_cap(kind: GeometryKind) -> Tuple[int, int]:
    """Admissible refinement range: icosphere subdivisions for the ball, divisions per edge for the cube."""
    if kind == GeometryKind.BALL:
        return 0, MAX_BALL_REFINEMENT
    return 1, MAX_CUBE_DIVISIONS


def check_level(kind: GeometryKind, level: int) -> None:
    lowest, highest = level_cap(kind)
    if not lowest <= level <= highest:
        raise ValueError(f'{kind.value} refinement must be in [{lowest}, {highest}], got {level}')


class GeometryConfig(Frozen):
    kind: GeometryKind = GeometryKind.BALL
    size: float = Field(1.0, gt=0.0)
    refinement: int = Field(1, ge=0)

    @root_validator(skip_on_failure=True)
    def check_refinement(cls, values):
        check_level(values['kind'], values['refinement'])
        return values

    def geometry(self) -> DomainGeometry:
        return DomainGeometry(kind=self.kind, size=self.size)


class CoefficientConfig(Frozen):
    family: CoefficientFamily = CoefficientFamily.CONSTANT
    params: Tuple[float, ...] = (1.0,)
    a_min: float = 1e-8
    a_max: Optional[float] = None

    @root_validator(skip_on_failure=True)
    def check_field(cls, values):
        CoefficientField(**values)
        return values

    def field(self) -> CoefficientField:
        return CoefficientField(family=self.family, params=self.params, a_min=self.a_min, a_max=self.a_max)


class RhsKind(str, Enum):
    ZERO = 'zero'
    CASE = 'case'
    POINT_SOURCES = 'point_sources'


class RhsConfig(Frozen):
    kind: RhsKind = RhsKind.ZERO
    sources: List[PointSource] = []

    @root_validator(skip_on_failure=True)
    def check_sources(cls, values):
        if values['kind'] == RhsKind.POINT_SOURCES and not values['sources']:
            raise ValueError('point_sources right-hand side needs at least one source')
        if values['kind'] != RhsKind.POINT_SOURCES and values['sources']:
            raise ValueError(f'sources are only allowed for kind "point_sources", not "{values["kind"].value}"')
        return values


class TraceKind(str, Enum):
    CONSTANT = 'constant'
    LINEAR = 'linear'
    CASE = 'case'


class DirichletConfig(Frozen):
    """constant: phi0 = value; linear: phi0 = c0 + c1 x1 + c2 x2 + c3 x3; case: trace of the case's u."""
    kind: TraceKind = TraceKind.CONSTANT
    value: float = 0.0
    coefficients: Tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)

    def trace(self):
        if self.kind == TraceKind.LINEAR:
            c = np.asarray(self.coefficients, dtype=float)
            return lambda points: c[0] + np.asarray(points) @ c[1:]
        value = self.value
        return lambda points: np.full(np.shape(points)[:-1], value)


class SolverConfig(Frozen):
    method: SolveMethod = SolveMethod.DIRECT_LU
    tol: float = Field(DEFAULT_TOLERANCE, gt=0.0, lt=1.0)


class RunConfig(Frozen):
    geometry: GeometryConfig = GeometryConfig()
    coefficient: CoefficientConfig = CoefficientConfig()
    rhs: RhsConfig = RhsConfig()
    dirichlet: DirichletConfig = DirichletConfig()
    quadrature: SingularPolicy = SingularPolicy()
    solver: SolverConfig = SolverConfig()
    output_dir: str = 'output'
    case: Optional[str] = None

    @validator('case')
    def known_case(cls, value):
        if value is None:
            return value
        names = [case.name for case in builtin_cases()]
        if value.upper() not in names:
            raise ValueError(f'unknown case {value!r}; available: {", ".join(names)}')
        return value.upper()

    @root_validator(skip_on_failure=True)
    def case_references(cls, values):
        uses_case = values['rhs'].kind == RhsKind.CASE or values['dirichlet'].kind == TraceKind.CASE
        if uses_case and values.get('case') is None:
            raise ValueError('rhs or dirichlet refer to the case but no "case" is set')
        return values
