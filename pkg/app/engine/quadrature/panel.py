import logging
from typing import Optional

import numpy as np

from app.engine.quadrature.analytic import panel_self_integral
from app.engine.quadrature.integrands import Integrand, difference_sum, frozen_factors, kernel_sum
from app.engine.quadrature.rules import (
    FAR_PANEL_ORDER,
    refine_uniformly,
    subdivide_triangles,
    triangle_rule,
    vertex_singular_triangle_rule,
)
from app.engine.quadrature.schemas import SelfTermStrategy, SingularPolicy
from app.exceptions.quadrature_error import QuadratureError

SLIVER_QUALITY = 1e-6
SELF_DIFFERENCE_DEPTH = 2


def triangle_areas(corners: np.ndarray) -> np.ndarray:
    cross = np.cross(corners[..., 1, :] - corners[..., 0, :], corners[..., 2, :] - corners[..., 0, :])
    return 0.5 * np.linalg.norm(cross, axis=-1)


def triangle_diameters(corners: np.ndarray) -> np.ndarray:
    return np.max(np.stack([
        np.linalg.norm(corners[..., 1, :] - corners[..., 0, :], axis=-1),
        np.linalg.norm(corners[..., 2, :] - corners[..., 1, :], axis=-1),
        np.linalg.norm(corners[..., 0, :] - corners[..., 2, :], axis=-1),
    ], axis=-1), axis=-1)


def triangle_quality(corners: np.ndarray) -> np.ndarray:
    """4 sqrt(3) area / sum of squared edges; 1 for the equilateral triangle."""
    edges = sum(
        np.sum((corners[..., (i + 1) % 3, :] - corners[..., i, :]) ** 2, axis=-1) for i in range(3)
    )
    return 4.0 * np.sqrt(3.0) * triangle_areas(corners) / np.where(edges > 0, edges, 1.0)


def panel_contains(corners: np.ndarray, normals: np.ndarray, y: np.ndarray, eps: float) -> np.ndarray:
    """True where y lies within eps of the closed panel."""
    height = np.sum((y - corners[..., 0, :]) * normals, axis=-1)
    projected = y - height[..., None] * normals
    inside = np.abs(height) <= eps
    for i in range(3):
        a = corners[..., i, :]
        b = corners[..., (i + 1) % 3, :]
        side = np.sum(np.cross(b - a, projected - a) * normals, axis=-1)
        inside &= side >= -eps * np.linalg.norm(b - a, axis=-1)
    return inside


def _rule_on(integrand, corners, normals, targets, target_normals, eps, order=FAR_PANEL_ORDER) -> np.ndarray:
    rule = triangle_rule(order)
    x = rule.map(corners)
    weights = triangle_areas(corners)[..., None] * rule.weights
    return kernel_sum(integrand, x, weights, targets, normals, target_normals, eps)


def integrate_panels_far(
    integrand: Integrand,
    corners: np.ndarray,
    normals: np.ndarray,
    targets: np.ndarray,
    target_normals: Optional[np.ndarray] = None,
    eps: float = 0.0,
) -> np.ndarray:
    """Fixed order-3 rule for every (target, panel) pair: returns (T, E)."""
    return _rule_on(
        integrand,
        corners[None],
        normals[None],
        targets[:, None, :],
        None if target_normals is None else target_normals[:, None, :],
        eps,
    )


def integrate_panels_near(
    integrand: Integrand,
    corners: np.ndarray,
    normals: np.ndarray,
    targets: np.ndarray,
    policy: SingularPolicy,
    target_normals: Optional[np.ndarray] = None,
    eps: float = 0.0,
) -> np.ndarray:
    """
    Adaptive 4-way subdivision for a batch of (panel, target) pairs given row by row.

    Sub-panels still within near_threshold diameters of their target are split again until policy.depth.
    """
    if np.any(panel_contains(corners, normals, targets, eps)):
        raise QuadratureError('target lies on a panel; integrate it with the self-term path')
    result = np.zeros(corners.shape[0])
    pair = np.arange(corners.shape[0])
    sub = corners
    for level in range(policy.depth + 1):
        if pair.size == 0:
            break
        centroids = sub.mean(axis=1)
        distance = np.linalg.norm(targets[pair] - centroids, axis=1)
        done = (distance > policy.near_threshold * triangle_diameters(sub)) | (level == policy.depth)
        if level < policy.depth and level == 0:
            done[:] = False
        if np.any(done):
            values = _rule_on(
                integrand,
                sub[done],
                normals[pair[done]],
                targets[pair[done]],
                None if target_normals is None else target_normals[pair[done]],
                eps,
            )
            np.add.at(result, pair[done], values)
        keep = ~done
        pair = np.repeat(pair[keep], 4)
        sub = subdivide_triangles(sub[keep]).reshape(-1, 3, 3)
    return result


def integrate_panels_self(
    integrand: Integrand,
    corners: np.ndarray,
    normals: np.ndarray,
    policy: SingularPolicy,
) -> np.ndarray:
    """Integral of the kernel over each panel with the target at its own centroid."""
    if not integrand.vanishes_in_plane:
        raise QuadratureError(f'kernel {integrand.name} is not weakly singular on a surface panel')
    quality = triangle_quality(corners)
    if np.any(quality < SLIVER_QUALITY):
        bad = int(np.argmin(quality))
        raise QuadratureError(f'sliver panel {bad} (quality {quality[bad]:.3g}) cannot carry a self term')

    centroids = corners.mean(axis=1)
    if policy.self_term == SelfTermStrategy.DUFFY:
        return _self_duffy(integrand, corners, normals, centroids)

    s_frozen, _ = frozen_factors(integrand, centroids, normals, normals)
    if s_frozen is None:
        return np.zeros(corners.shape[0])
    singular = s_frozen * panel_self_integral(corners)

    sub = refine_uniformly(corners, SELF_DIFFERENCE_DEPTH)
    rule = triangle_rule(FAR_PANEL_ORDER)
    x = rule.map(sub).reshape(corners.shape[0], -1, 3)
    weights = (triangle_areas(sub)[..., None] * rule.weights).reshape(corners.shape[0], -1)
    regular = difference_sum(
        integrand, x, weights, centroids, (s_frozen, None), normals, normals, with_vector_part=False,
    )
    return singular + regular


def _self_duffy(integrand, corners, normals, centroids) -> np.ndarray:
    rule = vertex_singular_triangle_rule()
    total = np.zeros(corners.shape[0])
    for i in range(3):
        sub = np.stack([centroids, corners[:, i], corners[:, (i + 1) % 3]], axis=1)
        x = rule.map(sub)
        weights = triangle_areas(sub)[:, None] * rule.weights
        s, _ = integrand.factors(x, centroids[:, None, :], normals[:, None, :], normals[:, None, :])
        if s is None:
            continue
        r = np.linalg.norm(x - centroids[:, None, :], axis=-1)
        total += np.sum(weights * s / (4.0 * np.pi * r), axis=-1)
    return total


def integrate_panel(
    integrand: Integrand,
    corners,
    normal,
    target,
    policy: SingularPolicy,
    target_normal=None,
    eps: float = 0.0,
) -> float:
    corners = np.asarray(corners, dtype=float)[None]
    normal = np.asarray(normal, dtype=float)[None]
    target = np.asarray(target, dtype=float)[None]
    target_normal = None if target_normal is None else np.asarray(target_normal, dtype=float)[None]
    distance = np.linalg.norm(target[0] - corners[0].mean(axis=0))
    if distance > policy.near_threshold * triangle_diameters(corners)[0]:
        return float(integrate_panels_far(integrand, corners[0], normal[0], target, target_normal, eps)[0, 0])
    logging.debug(f'Near panel integration for {integrand.name} at distance {distance:.3g}')
    return float(integrate_panels_near(integrand, corners, normal, target, policy, target_normal, eps)[0])


def integrate_panel_self(integrand: Integrand, corners, normal, policy: SingularPolicy) -> float:
    corners = np.asarray(corners, dtype=float)[None]
    normal = np.asarray(normal, dtype=float)[None]
    return float(integrate_panels_self(integrand, corners, normal, policy)[0])
