import math
from typing import Optional, Tuple

import numpy as np

from app.engine.coefficient.schemas import CoefficientField
from app.engine.kernels.schemas import KernelId
from app.exceptions.singularity_error import SingularityError

FOUR_PI = 4.0 * math.pi
EPS_SING = 1e-14


def _separation(x, y, eps: float) -> Tuple[np.ndarray, np.ndarray]:
    d = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
    r = np.linalg.norm(d, axis=-1)
    if np.any(r < eps):
        raise SingularityError(f'kernel evaluated at separation below {eps:g}; use the singular quadrature path')
    return d, r


def _dot(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    return np.sum(u * v, axis=-1)


def laplace_fundamental(x, y, eps: float = EPS_SING) -> np.ndarray:
    _, r = _separation(x, y, eps)
    return -1.0 / (FOUR_PI * r)


def laplace_gradient_x(x, y, eps: float = EPS_SING) -> np.ndarray:
    d, r = _separation(x, y, eps)
    return d / (FOUR_PI * r ** 3)[..., None]


def laplace_gradient_y(x, y, eps: float = EPS_SING) -> np.ndarray:
    return -laplace_gradient_x(x, y, eps)


def parametrix_x(x, y, field: CoefficientField, eps: float = EPS_SING) -> np.ndarray:
    return laplace_fundamental(x, y, eps) / field.eval(x)


def parametrix_y(x, y, field: CoefficientField, eps: float = EPS_SING) -> np.ndarray:
    return laplace_fundamental(x, y, eps) / field.eval(y)


def remainder_x(x, y, field: CoefficientField, eps: float = EPS_SING) -> np.ndarray:
    """Expanded form -lap(ln a)(x) P_lap - grad(ln a)(x) . grad_x P_lap."""
    p = laplace_fundamental(x, y, eps)
    g = laplace_gradient_x(x, y, eps)
    return -field.laplacian_log(x) * p - _dot(field.grad_log(x), g)


def remainder_y(x, y, field: CoefficientField, eps: float = EPS_SING) -> np.ndarray:
    return _dot(field.grad(x), laplace_gradient_x(x, y, eps)) / field.eval(y)


def conormal_x_kernel(x, n_x, y, field: CoefficientField, eps: float = EPS_SING) -> np.ndarray:
    n_x = np.asarray(n_x, dtype=float)
    p = laplace_fundamental(x, y, eps)
    return _dot(n_x, laplace_gradient_x(x, y, eps)) - p * _dot(n_x, field.grad_log(x))


def laplace_conormal(x, n_x, y, eps: float = EPS_SING) -> np.ndarray:
    return _dot(np.asarray(n_x, dtype=float), laplace_gradient_x(x, y, eps))


def conormal_y_kernel(x, y, n_y, field: CoefficientField, eps: float = EPS_SING) -> np.ndarray:
    """Conormal derivative in y of P^x: (a(y)/a(x)) n_y . grad_y P_lap."""
    n_y = np.asarray(n_y, dtype=float)
    return field.eval(y) / field.eval(x) * _dot(n_y, laplace_gradient_y(x, y, eps))


def evaluate(
    kernel: KernelId,
    x,
    y,
    field: CoefficientField,
    n_x=None,
    n_y=None,
    eps: float = EPS_SING,
) -> np.ndarray:
    if kernel.needs_source_normal and n_x is None:
        raise ValueError(f'kernel {kernel.value} needs the source normal')
    if kernel.needs_target_normal and n_y is None:
        raise ValueError(f'kernel {kernel.value} needs the target normal')

    if kernel == KernelId.LAPLACE:
        return laplace_fundamental(x, y, eps)
    if kernel == KernelId.PARAMETRIX_X:
        return parametrix_x(x, y, field, eps)
    if kernel == KernelId.PARAMETRIX_Y:
        return parametrix_y(x, y, field, eps)
    if kernel == KernelId.REMAINDER_X:
        return remainder_x(x, y, field, eps)
    if kernel == KernelId.REMAINDER_Y:
        return remainder_y(x, y, field, eps)
    if kernel == KernelId.CONORMAL_X:
        return conormal_x_kernel(x, n_x, y, field, eps)
    if kernel == KernelId.LAPLACE_CONORMAL:
        return laplace_conormal(x, n_x, y, eps)
    return conormal_y_kernel(x, y, n_y, field, eps)


def kernel_factors(
    kernel: KernelId,
    x,
    y,
    field: CoefficientField,
    n_x=None,
    n_y=None,
) -> Tuple[Optional[np.ndarray], Optional[np.ndarray]]:
    """
    Split a kernel as K(x, y) = s / (4 pi r) + g . (x - y) / (4 pi r^3).

    Returns (s, g); either may be None when that part vanishes identically.
    s and g are smooth in x, which is what the singular quadrature paths rely on.
    x and y only need to broadcast against each other; a(x) and a(y) are evaluated on their own shapes.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if kernel == KernelId.LAPLACE:
        return np.asarray(-1.0), None
    if kernel == KernelId.PARAMETRIX_X:
        return -1.0 / field.eval(x), None
    if kernel == KernelId.PARAMETRIX_Y:
        return -1.0 / field.eval(y), None
    if kernel == KernelId.REMAINDER_X:
        if field.is_constant:
            return None, None
        return field.laplacian_log(x), -field.grad_log(x)
    if kernel == KernelId.REMAINDER_Y:
        if field.is_constant:
            return None, None
        return None, field.grad(x) / field.eval(y)[..., None]
    if kernel == KernelId.CONORMAL_X:
        n_x = np.asarray(n_x, dtype=float)
        if field.is_constant:
            return None, n_x
        return _dot(n_x, field.grad_log(x)), n_x
    if kernel == KernelId.LAPLACE_CONORMAL:
        return None, np.asarray(n_x, dtype=float)
    n_y = np.asarray(n_y, dtype=float)
    return None, -(field.eval(y) / field.eval(x))[..., None] * n_y
