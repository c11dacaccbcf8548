import math
from enum import Enum
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, root_validator, validator

from app.exceptions.coefficient_error import CoefficientError

PARAM_COUNTS = {
    'constant': (1,),
    'linear': (4,),
    'quadratic': (2, 4),
    'exponential': (3,),
}


class CoefficientFamily(str, Enum):
    CONSTANT = 'constant'
    LINEAR = 'linear'
    QUADRATIC = 'quadratic'
    EXPONENTIAL = 'exponential'


class BoundingBox(BaseModel):
    lower: Tuple[float, float, float]
    upper: Tuple[float, float, float]

    class Config:
        allow_mutation = False

    @root_validator(skip_on_failure=True)
    def check_ordering(cls, values):
        if any(lo > hi for lo, hi in zip(values['lower'], values['upper'])):
            raise ValueError('box lower corner must not exceed upper corner')
        return values

    @classmethod
    def cube(cls, half_width: float, center=(0.0, 0.0, 0.0)):
        c = tuple(float(v) for v in center)
        return cls(
            lower=tuple(v - half_width for v in c),
            upper=tuple(v + half_width for v in c),
        )


class CoefficientField(BaseModel):
    """
    Scalar diffusion coefficient a(x) of the operator div(a grad u).

    Families and parameters:
      constant     a = c0                                  params [c0]
      linear       a = c0 + b.x                            params [c0, b1, b2, b3]
      quadratic    a = c0 + k |x|^2 or c0 + sum k_i x_i^2  params [c0, k] or [c0, k1, k2, k3]
      exponential  a = exp(p.x)                            params [p1, p2, p3]

    Every evaluation accepts a single point or an array of points with trailing dimension 3.
    """
    family: CoefficientFamily
    params: Tuple[float, ...]
    a_min: float = 1e-8
    a_max: Optional[float] = None

    class Config:
        allow_mutation = False
        extra = 'forbid'

    @validator('a_min')
    def check_a_min(cls, value):
        if value <= 0:
            raise ValueError('a_min must be positive')
        return value

    @root_validator(skip_on_failure=True)
    def check_params(cls, values):
        family = values['family']
        params = values['params']
        if len(params) not in PARAM_COUNTS[family.value]:
            raise ValueError(
                f'family {family.value} expects {" or ".join(map(str, PARAM_COUNTS[family.value]))} params, '
                f'got {len(params)}',
            )
        if not all(math.isfinite(p) for p in params):
            raise ValueError('coefficient params must be finite')
        a_max = values.get('a_max')
        if a_max is not None and a_max < values['a_min']:
            raise ValueError('a_max must not be smaller than a_min')
        return values

    @classmethod
    def constant(cls, value: float = 1.0, **kwargs):
        return cls(family=CoefficientFamily.CONSTANT, params=(value,), **kwargs)

    @property
    def is_constant(self) -> bool:
        return self.family == CoefficientFamily.CONSTANT

    def _quadratic_weights(self) -> np.ndarray:
        if len(self.params) == 2:
            return np.full(3, self.params[1])
        return np.asarray(self.params[1:], dtype=float)

    def eval(self, x) -> np.ndarray:
        x = _as_points(x)
        if self.family == CoefficientFamily.CONSTANT:
            return np.full(x.shape[:-1], self.params[0], dtype=float)
        if self.family == CoefficientFamily.LINEAR:
            return self.params[0] + x @ np.asarray(self.params[1:], dtype=float)
        if self.family == CoefficientFamily.QUADRATIC:
            return self.params[0] + (x * x) @ self._quadratic_weights()
        if self.family == CoefficientFamily.EXPONENTIAL:
            return np.exp(x @ np.asarray(self.params, dtype=float))
        raise CoefficientError(f'Unknown coefficient family {self.family}')

    def grad(self, x) -> np.ndarray:
        x = _as_points(x)
        if self.family == CoefficientFamily.CONSTANT:
            return np.zeros(x.shape, dtype=float)
        if self.family == CoefficientFamily.LINEAR:
            return np.broadcast_to(np.asarray(self.params[1:], dtype=float), x.shape).copy()
        if self.family == CoefficientFamily.QUADRATIC:
            return 2.0 * x * self._quadratic_weights()
        if self.family == CoefficientFamily.EXPONENTIAL:
            p = np.asarray(self.params, dtype=float)
            return self.eval(x)[..., None] * p
        raise CoefficientError(f'Unknown coefficient family {self.family}')

    def grad_log(self, x) -> np.ndarray:
        x = _as_points(x)
        if self.family == CoefficientFamily.CONSTANT:
            return np.zeros(x.shape, dtype=float)
        if self.family == CoefficientFamily.EXPONENTIAL:
            return np.broadcast_to(np.asarray(self.params, dtype=float), x.shape).copy()
        return self.grad(x) / self.eval(x)[..., None]

    def laplacian_log(self, x) -> np.ndarray:
        x = _as_points(x)
        if self.family in (CoefficientFamily.CONSTANT, CoefficientFamily.EXPONENTIAL):
            return np.zeros(x.shape[:-1], dtype=float)
        a = self.eval(x)
        if self.family == CoefficientFamily.LINEAR:
            b = np.asarray(self.params[1:], dtype=float)
            return -float(b @ b) / (a * a)
        # quadratic: sum_i d/dx_i (2 k_i x_i / a) = sum_i 2 k_i / a - (2 k_i x_i)^2 / a^2
        k = self._quadratic_weights()
        g = 2.0 * x * k
        return 2.0 * float(k.sum()) / a - np.sum(g * g, axis=-1) / (a * a)

    def describe(self) -> str:
        return f'{self.family.value}{list(self.params)}'


def _as_points(x) -> np.ndarray:
    points = np.asarray(x, dtype=float)
    if points.shape[-1:] != (3,):
        raise CoefficientError(f'Expected points with trailing dimension 3, got shape {points.shape}')
    return points
