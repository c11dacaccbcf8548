from dataclasses import dataclass
from typing import Optional, Protocol, Tuple

import numpy as np

from app.engine.coefficient.schemas import CoefficientField
from app.engine.kernels.evaluate import FOUR_PI, kernel_factors
from app.engine.kernels.schemas import KernelId
from app.exceptions.singularity_error import SingularityError

Factors = Tuple[Optional[np.ndarray], Optional[np.ndarray]]

PLANAR_KERNELS = (
    KernelId.LAPLACE,
    KernelId.PARAMETRIX_X,
    KernelId.PARAMETRIX_Y,
    KernelId.CONORMAL_X,
    KernelId.LAPLACE_CONORMAL,
    KernelId.CONORMAL_Y,
)


class Integrand(Protocol):
    """
    A kernel in the split form K(x, y) = s / (4 pi r) + g . (x - y) / (4 pi r^3).

    vanishes_in_plane: the vector part is normal to the source panel when x and y share a flat panel,
    so only the 1/r part survives on the panel itself.
    """
    name: str
    needs_source_normal: bool
    vanishes_in_plane: bool

    def factors(self, x, y, n_x=None, n_y=None) -> Factors:
        ...


@dataclass(frozen=True)
class KernelIntegrand:
    kernel: KernelId
    field: CoefficientField

    @property
    def name(self) -> str:
        return self.kernel.value

    @property
    def needs_source_normal(self) -> bool:
        return self.kernel.needs_source_normal

    @property
    def vanishes_in_plane(self) -> bool:
        return self.kernel in PLANAR_KERNELS

    def factors(self, x, y, n_x=None, n_y=None) -> Factors:
        return kernel_factors(self.kernel, x, y, self.field, n_x, n_y)


def kernel_sum(
    integrand: Integrand,
    x: np.ndarray,
    weights: np.ndarray,
    y: np.ndarray,
    n_x: Optional[np.ndarray] = None,
    n_y: Optional[np.ndarray] = None,
    eps: float = 0.0,
) -> np.ndarray:
    """
    Weighted sum over the quadrature axis of the split kernel.

    x (..., q, 3), weights (..., q), y (..., 3); n_x (..., 3) per element, n_y (..., 3) per target.
    """
    yq = y[..., None, :]
    d = x - yq
    r = np.linalg.norm(d, axis=-1)
    if np.any(r < eps):
        raise SingularityError(f'quadrature point closer than {eps:g} to the target')
    s, g = integrand.factors(
        x,
        yq,
        None if n_x is None else n_x[..., None, :],
        None if n_y is None else n_y[..., None, :],
    )
    values = 0.0
    if s is not None:
        values = values + s / (FOUR_PI * r)
    if g is not None:
        values = values + np.sum(g * d, axis=-1) / (FOUR_PI * r ** 3)
    return np.sum(weights * values, axis=-1)


def difference_sum(
    integrand: Integrand,
    x: np.ndarray,
    weights: np.ndarray,
    y: np.ndarray,
    frozen: Factors,
    n_x: Optional[np.ndarray] = None,
    n_y: Optional[np.ndarray] = None,
    with_vector_part: bool = True,
) -> np.ndarray:
    """
    Weighted sum of the kernel minus its factors frozen at the target.

    The difference is bounded near y; points that coincide with y contribute nothing.
    """
    yq = y[..., None, :]
    d = x - yq
    r = np.linalg.norm(d, axis=-1)
    hit = r == 0.0
    safe_r = np.where(hit, 1.0, r)
    s, g = integrand.factors(
        x,
        yq,
        None if n_x is None else n_x[..., None, :],
        None if n_y is None else n_y[..., None, :],
    )
    s_frozen, g_frozen = frozen
    values = np.zeros(r.shape)
    if s is not None:
        values = values + (s - s_frozen[..., None]) / (FOUR_PI * safe_r)
    if with_vector_part and g is not None:
        values = values + np.sum((g - g_frozen[..., None, :]) * d, axis=-1) / (FOUR_PI * safe_r ** 3)
    values = np.where(hit, 0.0, values)
    return np.sum(weights * values, axis=-1)


def frozen_factors(
    integrand: Integrand,
    y: np.ndarray,
    n_x: Optional[np.ndarray] = None,
    n_y: Optional[np.ndarray] = None,
) -> Factors:
    """Factors with x placed at the target, broadcast to y's leading shape."""
    s, g = integrand.factors(y, y, n_x, n_y)
    lead = y.shape[:-1]
    s_out = None if s is None else np.broadcast_to(s, lead).astype(float)
    g_out = None if g is None else np.broadcast_to(g, lead + (3,)).astype(float)
    return s_out, g_out
