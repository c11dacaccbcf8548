import logging

import numpy as np

from app.engine.coefficient.schemas import CoefficientField
from app.engine.mesh.schemas import SurfaceMesh
from app.engine.potentials.assembly import surface_rows, timed
from app.engine.potentials.relations import integrand_for
from app.engine.potentials.schemas import AssemblyPath, OperatorId, ParametrixKind, PotentialMatrix, TargetSet
from app.engine.quadrature.schemas import SingularPolicy
from app.exceptions.assembly_error import AssemblyError


def _matrix(
    values: np.ndarray,
    operator: OperatorId,
    path: AssemblyPath,
    targets: TargetSet,
    parametrix: ParametrixKind,
) -> PotentialMatrix:
    return PotentialMatrix(values=values, operator=operator, path=path, targets=targets.label, parametrix=parametrix)


def assemble_V(
    surface: SurfaceMesh,
    targets: TargetSet,
    field: CoefficientField,
    policy: SingularPolicy,
    path: AssemblyPath = AssemblyPath.DIRECT,
    parametrix: ParametrixKind = ParametrixKind.X,
) -> PotentialMatrix:
    """Single layer: entry (t, j) = -integral over panel j of P(x, y_t); centroid targets get self terms."""
    integrand = integrand_for(OperatorId.V, field, path, parametrix)
    with timed(f'V[{path.value}, P^{parametrix.value}] {targets.size}x{surface.n_panels}'):
        values = -surface_rows(surface, targets, integrand, policy)
    return _matrix(values, OperatorId.V, path, targets, parametrix)


def assemble_W(
    surface: SurfaceMesh,
    targets: TargetSet,
    field: CoefficientField,
    policy: SingularPolicy,
    path: AssemblyPath = AssemblyPath.DIRECT,
) -> PotentialMatrix:
    """Double layer at off-boundary targets: entry (t, j) = -integral over panel j of T_x P(x, y_t)."""
    if np.any(targets.panel_of >= 0):
        raise AssemblyError('double layer targets lie on panel centroids; assemble the direct value calW instead')
    integrand = integrand_for(OperatorId.W, field, path)
    with timed(f'W[{path.value}] {targets.size}x{surface.n_panels}'):
        values = -surface_rows(surface, targets, integrand, policy)
    return _matrix(values, OperatorId.W, path, targets, ParametrixKind.X)


def assemble_calV(
    surface: SurfaceMesh,
    field: CoefficientField,
    policy: SingularPolicy,
    path: AssemblyPath = AssemblyPath.DIRECT,
    parametrix: ParametrixKind = ParametrixKind.X,
) -> PotentialMatrix:
    targets = TargetSet.centroids(surface)
    integrand = integrand_for(OperatorId.V, field, path, parametrix)
    with timed(f'calV[{path.value}, P^{parametrix.value}] {surface.n_panels}x{surface.n_panels}'):
        values = -surface_rows(surface, targets, integrand, policy)
    return _matrix(values, OperatorId.CAL_V, path, targets, parametrix)


def assemble_calW(
    surface: SurfaceMesh,
    field: CoefficientField,
    policy: SingularPolicy,
    path: AssemblyPath = AssemblyPath.DIRECT,
) -> PotentialMatrix:
    """
    Direct value of the double layer at centroids.

    The harmonic part has no self contribution on a flat panel; the self entry keeps only the
    -(n . grad ln a) / (4 pi r) part. The trace from inside the domain is calW - I/2.
    """
    targets = TargetSet.centroids(surface)
    integrand = integrand_for(OperatorId.W, field, path)
    with timed(f'calW[{path.value}] {surface.n_panels}x{surface.n_panels}'):
        values = -surface_rows(surface, targets, integrand, policy)
    return _matrix(values, OperatorId.CAL_W, path, targets, ParametrixKind.X)


def assemble_calWprime(
    surface: SurfaceMesh,
    field: CoefficientField,
    policy: SingularPolicy,
    path: AssemblyPath = AssemblyPath.DIRECT,
) -> PotentialMatrix:
    """Direct value of the conormal derivative of V: kernel -T_y P(x, y), zero self entries on flat panels."""
    targets = TargetSet.centroids(surface)
    integrand = integrand_for(OperatorId.CAL_W_PRIME, field, path)
    with timed(f'calWprime[{path.value}] {surface.n_panels}x{surface.n_panels}'):
        values = -surface_rows(surface, targets, integrand, policy, needs_target_normals=True)
    return _matrix(values, OperatorId.CAL_W_PRIME, path, targets, ParametrixKind.X)


def trace_double_layer(calW: PotentialMatrix) -> np.ndarray:
    """Trace from inside the domain, gamma^+ W = calW - I/2."""
    if calW.operator != OperatorId.CAL_W:
        raise AssemblyError(f'expected a calW matrix, got {calW.operator.value}')
    logging.debug('Applying the double layer jump -I/2')
    return calW.values - 0.5 * np.eye(calW.n_targets)
