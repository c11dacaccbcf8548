from functools import lru_cache
from typing import Tuple

import numpy as np
from scipy.special import roots_jacobi

from app.engine.quadrature.schemas import TetRule, TriangleRule
from app.exceptions.quadrature_error import QuadratureError

FAR_PANEL_ORDER = 3
FAR_CELL_ORDER = 2
SINGULAR_RADIAL_POINTS = 5
SINGULAR_ANGULAR_POINTS = 20
MAX_ORDER = 40


def _points_for(order: int) -> int:
    if order < 0 or order > MAX_ORDER:
        raise QuadratureError(f'rule order must be in [0, {MAX_ORDER}], got {order}')
    return max(1, (order + 2) // 2)


def gauss_legendre_01(n: int) -> Tuple[np.ndarray, np.ndarray]:
    t, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (t + 1.0), 0.5 * w


def gauss_jacobi_01(n: int, alpha: int) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [0, 1] for the weight (1 - u)^alpha."""
    if alpha == 0:
        return gauss_legendre_01(n)
    t, w = roots_jacobi(n, alpha, 0)
    return 0.5 * (t + 1.0), w / 2.0 ** (alpha + 1)


@lru_cache(maxsize=None)
def triangle_rule(order: int) -> TriangleRule:
    """Conical-product rule exact for polynomials of total degree <= order."""
    n = _points_for(order)
    u, wu = gauss_jacobi_01(n, 1)
    v, wv = gauss_legendre_01(n)
    uu, vv = np.meshgrid(u, v, indexing='ij')
    xi = uu.ravel()
    eta = ((1.0 - uu) * vv).ravel()
    weights = 2.0 * np.outer(wu, wv).ravel()
    points = np.column_stack([1.0 - xi - eta, xi, eta])
    return TriangleRule(order=order, points=points, weights=weights)


@lru_cache(maxsize=None)
def tet_rule(order: int) -> TetRule:
    n = _points_for(order)
    u, wu = gauss_jacobi_01(n, 2)
    v, wv = gauss_jacobi_01(n, 1)
    w, ww = gauss_legendre_01(n)
    uu, vv, ww_ = np.meshgrid(u, v, w, indexing='ij')
    xi = uu.ravel()
    eta = ((1.0 - uu) * vv).ravel()
    zeta = ((1.0 - uu) * (1.0 - vv) * ww_).ravel()
    weights = 6.0 * np.einsum('i,j,k->ijk', wu, wv, ww).ravel()
    points = np.column_stack([1.0 - xi - eta - zeta, xi, eta, zeta])
    return TetRule(order=order, points=points, weights=weights)


@lru_cache(maxsize=None)
def vertex_singular_triangle_rule(
    n_radial: int = SINGULAR_RADIAL_POINTS,
    n_angular: int = SINGULAR_ANGULAR_POINTS,
) -> TriangleRule:
    """
    Duffy rule for integrands with a 1/r singularity at corner 0.

    x = c0 + u (c1 - c0) + u v (c2 - c1); the Jacobian u cancels the singularity.
    """
    u, wu = gauss_legendre_01(n_radial)
    v, wv = gauss_legendre_01(n_angular)
    uu, vv = (a.ravel() for a in np.meshgrid(u, v, indexing='ij'))
    points = np.column_stack([1.0 - uu, uu * (1.0 - vv), uu * vv])
    weights = 2.0 * uu * np.outer(wu, wv).ravel()
    return TriangleRule(order=min(2 * n_radial - 2, 2 * n_angular - 1), points=points, weights=weights)


@lru_cache(maxsize=None)
def vertex_singular_tet_rule(n_radial: int = SINGULAR_RADIAL_POINTS, n_angular: int = 8) -> TetRule:
    """
    Collapsed rule for integrands with a 1/r^2 singularity at corner 0.

    x = c0 + u [(c1 - c0) + v ((c2 - c1) + w (c3 - c2))]; Jacobian u^2 v times 6 |T|.
    """
    u, wu = gauss_legendre_01(n_radial)
    v, wv = gauss_legendre_01(n_angular)
    uu, vv, ww = (a.ravel() for a in np.meshgrid(u, v, v, indexing='ij'))
    points = np.column_stack([1.0 - uu, uu * (1.0 - vv), uu * vv * (1.0 - ww), uu * vv * ww])
    weights = 6.0 * uu * uu * vv * np.einsum('i,j,k->ijk', wu, wv, wv).ravel()
    return TetRule(order=min(2 * n_radial - 3, 2 * n_angular - 2), points=points, weights=weights)


def subdivide_triangles(corners: np.ndarray) -> np.ndarray:
    """Midpoint split: (..., 3, 3) -> (..., 4, 3, 3)."""
    a, b, c = corners[..., 0, :], corners[..., 1, :], corners[..., 2, :]
    ab, bc, ca = 0.5 * (a + b), 0.5 * (b + c), 0.5 * (c + a)
    return np.stack([
        np.stack([a, ab, ca], axis=-2),
        np.stack([ab, b, bc], axis=-2),
        np.stack([ca, bc, c], axis=-2),
        np.stack([ab, bc, ca], axis=-2),
    ], axis=-3)


def octasect(corners: np.ndarray) -> np.ndarray:
    """Split into 8 tetrahedra of equal volume: (..., 4, 3) -> (..., 8, 4, 3)."""
    v0, v1, v2, v3 = (corners[..., i, :] for i in range(4))
    m01, m02, m03 = 0.5 * (v0 + v1), 0.5 * (v0 + v2), 0.5 * (v0 + v3)
    m12, m13, m23 = 0.5 * (v1 + v2), 0.5 * (v1 + v3), 0.5 * (v2 + v3)
    children = [
        (v0, m01, m02, m03),
        (m01, v1, m12, m13),
        (m02, m12, v2, m23),
        (m03, m13, m23, v3),
        (m01, m02, m03, m13),
        (m01, m02, m12, m13),
        (m02, m03, m13, m23),
        (m02, m12, m13, m23),
    ]
    return np.stack([np.stack(child, axis=-2) for child in children], axis=-3)


def refine_uniformly(corners: np.ndarray, levels: int) -> np.ndarray:
    """Uniform refinement flattened to (..., k, n_corners, 3)."""
    split = subdivide_triangles if corners.shape[-2] == 3 else octasect
    lead = corners.shape[:-2]
    out = corners.reshape(lead + (1,) + corners.shape[-2:])
    for _ in range(levels):
        out = split(out)
        out = out.reshape(lead + (-1,) + corners.shape[-2:])
    return out
