import logging
from dataclasses import dataclass
from typing import Callable, List

import numpy as np

from app.engine.bdie.schemas import RightHandSide
from app.engine.coefficient.schemas import CoefficientFamily, CoefficientField
from app.engine.mesh.schemas import SurfaceMesh, VolumeMesh
from app.engine.potentials.schemas import BoundaryDensity, DomainDensity
from app.exceptions.config_error import ConfigError

GUARD_POINTS = 100
GUARD_STEP = 1e-4
GUARD_TOLERANCE = 1e-6

PointFunction = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ManufacturedCase:
    """
    Exact solution of div(a grad u) = f with closed-form f and gradient.

    exact: the discrete space holds u exactly (piecewise constants), so no convergence order applies.
    """
    name: str
    description: str
    field: CoefficientField
    u: PointFunction
    grad_u: PointFunction
    f: PointFunction
    exact: bool = False

    def trace(self, surface: SurfaceMesh) -> BoundaryDensity:
        return BoundaryDensity.sample(surface, self.u)

    def conormal(self, surface: SurfaceMesh) -> BoundaryDensity:
        """a du/dn at the centroids, with the flat panel normals."""
        centroids = surface.centroids
        flux = self.field.eval(centroids) * np.sum(self.grad_u(centroids) * surface.normals, axis=-1)
        return BoundaryDensity(values=flux)

    def u_cells(self, volume: VolumeMesh) -> DomainDensity:
        return DomainDensity.sample(volume, self.u)

    def rhs(self, volume: VolumeMesh) -> RightHandSide:
        return RightHandSide.from_function(volume, self.f)


def apply_operator_fd(field: CoefficientField, fn: PointFunction, points: np.ndarray, step) -> np.ndarray:
    """
    div(a grad fn) by the conservative 7-point scheme with a at the half steps.

    step is a scalar or one step per point.
    """
    points = np.atleast_2d(points)
    h = np.broadcast_to(np.asarray(step, dtype=float), points.shape[:1])[:, None]
    centre = fn(points)
    total = np.zeros(points.shape[0])
    for i in range(3):
        e = np.zeros(3)
        e[i] = 1.0
        forward = field.eval(points + 0.5 * h * e) * (fn(points + h * e) - centre)
        backward = field.eval(points - 0.5 * h * e) * (centre - fn(points - h * e))
        total += (forward - backward) / (h[:, 0] ** 2)
    return total


def check_case(case: ManufacturedCase, n_points: int = GUARD_POINTS, seed: int = 0) -> float:
    """Max |f - A u| at random points of the unit ball; raises ConfigError above GUARD_TOLERANCE."""
    rng = np.random.default_rng(seed)
    directions = rng.normal(size=(n_points, 3))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    points = directions * (0.95 * rng.random(n_points) ** (1.0 / 3.0))[:, None]
    error = float(np.max(np.abs(apply_operator_fd(case.field, case.u, points, GUARD_STEP) - case.f(points))))
    logging.info(f'Case {case.name}: f-consistency guard max error {error:.3g}')
    if error > GUARD_TOLERANCE:
        raise ConfigError(f'case {case.name}: f does not match div(a grad u), max error {error:.3g}')
    return error


def _x1(points):
    return np.asarray(points)[..., 0]


def _e1(points):
    g = np.zeros(np.shape(points))
    g[..., 0] = 1.0
    return g


def _zero(points):
    return np.zeros(np.shape(points)[:-1])


def builtin_cases() -> List[ManufacturedCase]:
    return [
        ManufacturedCase(
            name='C1',
            description='a = 1, u = 1, f = 0',
            field=CoefficientField.constant(1.0),
            u=lambda p: np.ones(np.shape(p)[:-1]),
            grad_u=lambda p: np.zeros(np.shape(p)),
            f=_zero,
            exact=True,
        ),
        ManufacturedCase(
            name='C2',
            description='a = 1, u = x1, f = 0',
            field=CoefficientField.constant(1.0),
            u=_x1,
            grad_u=_e1,
            f=_zero,
        ),
        ManufacturedCase(
            name='C3',
            description='a = 1 + x1^2, u = x1, f = 2 x1',
            field=CoefficientField(family=CoefficientFamily.QUADRATIC, params=(1.0, 1.0, 0.0, 0.0)),
            u=_x1,
            grad_u=_e1,
            f=lambda p: 2.0 * _x1(p),
        ),
        ManufacturedCase(
            name='C4',
            description='a = exp(x1), u = x1^2, f = exp(x1) (2 + 2 x1)',
            field=CoefficientField(family=CoefficientFamily.EXPONENTIAL, params=(1.0, 0.0, 0.0)),
            u=lambda p: _x1(p) ** 2,
            grad_u=lambda p: 2.0 * _x1(p)[..., None] * _e1(p),
            f=lambda p: np.exp(_x1(p)) * (2.0 + 2.0 * _x1(p)),
        ),
    ]


def get_case(name: str) -> ManufacturedCase:
    for case in builtin_cases():
        if case.name.lower() == name.lower():
            return case
    raise ConfigError(f'unknown manufactured case {name!r}; available: {", ".join(c.name for c in builtin_cases())}')
