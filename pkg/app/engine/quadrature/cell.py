import logging

import numpy as np

from app.engine.quadrature.analytic import ball_self_integral, tet_singular_integrals
from app.engine.quadrature.integrands import Integrand, difference_sum, frozen_factors, kernel_sum
from app.engine.quadrature.rules import FAR_CELL_ORDER, refine_uniformly, tet_rule, vertex_singular_tet_rule
from app.engine.quadrature.schemas import SelfTermStrategy, SingularPolicy
from app.exceptions.quadrature_error import QuadratureError

BARYCENTER_TOLERANCE = 1e-12
APEX_FACES = ((1, 2, 3), (0, 2, 3), (0, 1, 3), (0, 1, 2))


def tet_volumes(corners: np.ndarray) -> np.ndarray:
    e1 = corners[..., 1, :] - corners[..., 0, :]
    e2 = corners[..., 2, :] - corners[..., 0, :]
    e3 = corners[..., 3, :] - corners[..., 0, :]
    return np.abs(np.einsum('...i,...i->...', np.cross(e1, e2), e3)) / 6.0


def tet_diameters(corners: np.ndarray) -> np.ndarray:
    lengths = [
        np.linalg.norm(corners[..., i, :] - corners[..., j, :], axis=-1)
        for i in range(4) for j in range(i + 1, 4)
    ]
    return np.max(np.stack(lengths, axis=-1), axis=-1)


def _check_volume_kernel(integrand: Integrand) -> None:
    if integrand.needs_source_normal:
        raise QuadratureError(f'kernel {integrand.name} needs a surface normal and cannot be integrated over cells')


def _rule_points(corners: np.ndarray, levels: int):
    rule = tet_rule(FAR_CELL_ORDER)
    sub = refine_uniformly(corners, levels)
    lead = corners.shape[:-2]
    x = rule.map(sub).reshape(lead + (-1, 3))
    weights = (tet_volumes(sub)[..., None] * rule.weights).reshape(lead + (-1,))
    return x, weights


def integrate_cells_far(
    integrand: Integrand,
    corners: np.ndarray,
    targets: np.ndarray,
    target_normals=None,
    eps: float = 0.0,
) -> np.ndarray:
    """Order-2 tetrahedron rule for every (target, cell) pair: returns (T, E)."""
    _check_volume_kernel(integrand)
    x, weights = _rule_points(corners, 0)
    return kernel_sum(
        integrand,
        x[None],
        weights[None],
        targets[:, None, :],
        None,
        None if target_normals is None else target_normals[:, None, :],
        eps,
    )


def integrate_cells_near(
    integrand: Integrand,
    corners: np.ndarray,
    targets: np.ndarray,
    policy: SingularPolicy,
    target_normals=None,
) -> np.ndarray:
    """
    Near and touching (cell, target) pairs given row by row.

    The kernel factors are frozen at the target and integrated exactly over the cell; the bounded
    remainder is integrated on an octasection, one level deep for targets closer than one diameter.
    """
    _check_volume_kernel(integrand)
    barycenters = corners.mean(axis=1)
    diameters = tet_diameters(corners)
    distance = np.linalg.norm(targets - barycenters, axis=1)
    if np.any(distance <= BARYCENTER_TOLERANCE * diameters):
        raise QuadratureError('target is a cell barycenter; integrate it with the self-term path')

    frozen = frozen_factors(integrand, targets, None, target_normals)
    result = _frozen_exact(corners, targets, frozen)
    closest = distance <= diameters
    for levels, group in ((min(policy.depth, 1), closest), (0, ~closest)):
        if not np.any(group):
            continue
        x, weights = _rule_points(corners[group], levels)
        result[group] += difference_sum(
            integrand,
            x,
            weights,
            targets[group],
            _select(frozen, group),
            None,
            None if target_normals is None else target_normals[group],
        )
    return result


def _select(frozen, mask):
    s, g = frozen
    return (None if s is None else s[mask]), (None if g is None else g[mask])


def _frozen_exact(corners: np.ndarray, targets: np.ndarray, frozen) -> np.ndarray:
    s, g = frozen
    result = np.zeros(corners.shape[0])
    if s is None and g is None:
        return result
    potential, field = tet_singular_integrals(corners, targets)
    if s is not None:
        result += s * potential
    if g is not None:
        result += np.sum(g * field, axis=-1)
    return result


def integrate_cells_self(integrand: Integrand, corners: np.ndarray, policy: SingularPolicy) -> np.ndarray:
    """Integral of the kernel over each cell with the target at its own barycenter."""
    _check_volume_kernel(integrand)
    barycenters = corners.mean(axis=1)
    if policy.self_term == SelfTermStrategy.DUFFY:
        return _self_apex_split(integrand, corners, barycenters)

    s_frozen, g_frozen = frozen_factors(integrand, barycenters)
    if s_frozen is None and g_frozen is None:
        return np.zeros(corners.shape[0])
    # the odd part g(c) . (x - c) / r^3 integrates to zero over the equal-volume ball and is dropped
    singular = 0.0 if s_frozen is None else s_frozen * ball_self_integral(tet_volumes(corners))
    x, weights = _rule_points(corners, min(policy.depth, 1))
    return singular + difference_sum(integrand, x, weights, barycenters, (s_frozen, g_frozen))


def _self_apex_split(integrand: Integrand, corners: np.ndarray, apex: np.ndarray) -> np.ndarray:
    rule = vertex_singular_tet_rule()
    total = np.zeros(corners.shape[0])
    for face in APEX_FACES:
        sub = np.concatenate([apex[:, None, :], corners[:, face, :]], axis=1)
        x = rule.map(sub)
        weights = tet_volumes(sub)[:, None] * rule.weights
        total += kernel_sum(integrand, x, weights, apex)
    return total


def integrate_cell(integrand: Integrand, corners, target, policy: SingularPolicy, target_normal=None) -> float:
    corners = np.asarray(corners, dtype=float)[None]
    target = np.asarray(target, dtype=float)[None]
    target_normal = None if target_normal is None else np.asarray(target_normal, dtype=float)[None]
    distance = np.linalg.norm(target[0] - corners[0].mean(axis=0))
    if distance > policy.near_threshold * tet_diameters(corners)[0]:
        return float(integrate_cells_far(integrand, corners[0], target, target_normal)[0, 0])
    logging.debug(f'Near cell integration for {integrand.name} at distance {distance:.3g}')
    return float(integrate_cells_near(integrand, corners, target, policy, target_normal)[0])


def integrate_cell_self(integrand: Integrand, corners, policy: SingularPolicy) -> float:
    return float(integrate_cells_self(integrand, np.asarray(corners, dtype=float)[None], policy)[0])
