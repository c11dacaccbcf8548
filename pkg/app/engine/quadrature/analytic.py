import math
from typing import Tuple

import numpy as np

FOUR_PI = 4.0 * math.pi
LOCAL_FACES = np.array([[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]])


def _dot(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    return np.sum(u * v, axis=-1)


def _unit_normals(corners: np.ndarray) -> np.ndarray:
    cross = np.cross(corners[..., 1, :] - corners[..., 0, :], corners[..., 2, :] - corners[..., 0, :])
    return cross / np.linalg.norm(cross, axis=-1, keepdims=True)


def _log_r_plus_s(r: np.ndarray, s: np.ndarray, r0_squared: np.ndarray) -> np.ndarray:
    # log(R + s) without cancellation for s < 0, using (R + s)(R - s) = R0^2
    with np.errstate(divide='ignore', invalid='ignore'):
        return np.where(s >= 0.0, np.log(r + s), np.log(r0_squared) - np.log(r - s))


def triangle_inverse_distance(corners, y, normals=None) -> np.ndarray:
    """
    Exact value of the integral of 1/|x - y| over flat triangles, for any target y.

    corners (..., 3, 3) and y (..., 3) broadcast together. Edge contributions that vanish in the
    limit (target on an edge line, target in the plane) are set to zero explicitly.
    """
    corners = np.asarray(corners, dtype=float)
    y = np.asarray(y, dtype=float)
    n = _unit_normals(corners) if normals is None else np.asarray(normals, dtype=float)
    h = _dot(y - corners[..., 0, :], n)
    abs_h = np.abs(h)
    centre = corners.mean(axis=-2)
    scale = np.max(np.linalg.norm(corners - centre[..., None, :], axis=-1), axis=-1)
    tiny = 1e-14 * scale

    total = np.zeros(np.broadcast_shapes(h.shape, scale.shape))
    for i in range(3):
        a = corners[..., i, :]
        b = corners[..., (i + 1) % 3, :]
        edge = b - a
        t = edge / np.linalg.norm(edge, axis=-1, keepdims=True)
        m = np.cross(t, n)
        m = np.where((_dot(m, centre - a) > 0.0)[..., None], -m, m)

        s_minus = _dot(a - y, t)
        s_plus = _dot(b - y, t)
        p0 = _dot(a - y, m)
        r_minus = np.linalg.norm(a - y, axis=-1)
        r_plus = np.linalg.norm(b - y, axis=-1)
        r0_squared = p0 * p0 + h * h

        on_line = np.abs(p0) <= tiny
        with np.errstate(invalid='ignore'):
            log_term = _log_r_plus_s(r_plus, s_plus, r0_squared) - _log_r_plus_s(r_minus, s_minus, r0_squared)
        total = total + np.where(on_line, 0.0, p0 * np.where(on_line, 0.0, log_term))

        in_plane = abs_h <= tiny
        with np.errstate(divide='ignore', invalid='ignore'):
            angle = (
                np.arctan(p0 * s_plus / (r0_squared + abs_h * r_plus))
                - np.arctan(p0 * s_minus / (r0_squared + abs_h * r_minus))
            )
        total = total - np.where(in_plane | on_line, 0.0, abs_h * np.where(in_plane | on_line, 0.0, angle))
    return total


def panel_self_integral(corners) -> np.ndarray:
    """Integral of 1/(4 pi |x - c|) over each flat panel, c its centroid."""
    corners = np.asarray(corners, dtype=float)
    return triangle_inverse_distance(corners, corners.mean(axis=-2)) / FOUR_PI


def ball_self_integral(volumes) -> np.ndarray:
    """Integral of 1/(4 pi |x|) over the ball of equal volume: R^2 / 2."""
    radius = np.cbrt(3.0 * np.abs(np.asarray(volumes, dtype=float)) / FOUR_PI)
    return 0.5 * radius * radius


def tet_singular_integrals(corners, y) -> Tuple[np.ndarray, np.ndarray]:
    """
    Exact integrals over tetrahedra of 1/(4 pi r) and (x - y)/(4 pi r^3), r = |x - y|.

    Both are reduced to the faces with the divergence theorem, so y may be anywhere,
    including inside the cell or on its boundary.
    """
    corners = np.asarray(corners, dtype=float)
    y = np.asarray(y, dtype=float)
    potential = 0.0
    field = 0.0
    for i, face in enumerate(LOCAL_FACES):
        tri = corners[..., face, :]
        n = _unit_normals(tri)
        outward = _dot(n, corners[..., i, :] - tri[..., 0, :]) < 0.0
        n = np.where(outward[..., None], n, -n)
        j = triangle_inverse_distance(tri, y, n)
        height = _dot(n, tri[..., 0, :] - y)
        potential = potential + height * j
        field = field - n * j[..., None]
    return potential / (2.0 * FOUR_PI), field / FOUR_PI
