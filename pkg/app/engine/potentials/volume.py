import logging

import numpy as np

from app.engine.coefficient.schemas import CoefficientField
from app.engine.mesh.schemas import VolumeMesh
from app.engine.potentials.assembly import timed, volume_rows
from app.engine.potentials.relations import integrand_for
from app.engine.potentials.schemas import AssemblyPath, OperatorId, ParametrixKind, PotentialMatrix, TargetSet
from app.engine.quadrature.schemas import SingularPolicy


def assemble_P(
    volume: VolumeMesh,
    targets: TargetSet,
    field: CoefficientField,
    policy: SingularPolicy,
    path: AssemblyPath = AssemblyPath.DIRECT,
    parametrix: ParametrixKind = ParametrixKind.X,
) -> PotentialMatrix:
    """Volume potential: entry (t, c) = integral over cell c of P(x, y_t); barycenter targets get self terms."""
    integrand = integrand_for(OperatorId.P, field, path, parametrix)
    with timed(f'P[{path.value}, P^{parametrix.value}] {targets.size}x{volume.n_cells} at {targets.label}'):
        values = volume_rows(volume, targets, integrand, policy)
    return PotentialMatrix(
        values=values, operator=OperatorId.P, path=path, targets=targets.label, parametrix=parametrix,
    )


def assemble_R(
    volume: VolumeMesh,
    targets: TargetSet,
    field: CoefficientField,
    policy: SingularPolicy,
    path: AssemblyPath = AssemblyPath.DIRECT,
    parametrix: ParametrixKind = ParametrixKind.X,
) -> PotentialMatrix:
    """Remainder potential: entry (t, c) = integral over cell c of R(x, y_t); identically zero for constant a."""
    if field.is_constant:
        logging.info(f'R[{path.value}] vanishes for the constant coefficient {field.describe()}')
        values = np.zeros((targets.size, volume.n_cells))
    else:
        integrand = integrand_for(OperatorId.R, field, path, parametrix)
        with timed(f'R[{path.value}, P^{parametrix.value}] {targets.size}x{volume.n_cells} at {targets.label}'):
            values = volume_rows(volume, targets, integrand, policy)
    return PotentialMatrix(
        values=values, operator=OperatorId.R, path=path, targets=targets.label, parametrix=parametrix,
    )
