import logging
from typing import List, Optional

import numpy as np
from pydantic import BaseModel

from app.engine.coefficient.positivity import require_positive
from app.engine.coefficient.schemas import CoefficientField
from app.engine.mesh.builders import build_meshes
from app.engine.mesh.schemas import DomainGeometry
from app.engine.potentials.schemas import ParametrixKind, TargetSet
from app.engine.potentials.surface import assemble_calV
from app.engine.potentials.volume import assemble_P, assemble_R
from app.engine.quadrature.schemas import SingularPolicy


class ComparisonRow(BaseModel):
    quantity: str
    parametrix_x: Optional[float]
    parametrix_y: Optional[float]
    difference: float

    class Config:
        allow_mutation = False


class ComparisonReport(BaseModel):
    geometry: str
    coefficient: str
    refinement: int
    identical: bool
    remainder_ratio: Optional[float]
    rows: List[ComparisonRow]

    class Config:
        allow_mutation = False


def _matrix_rows(name: str, x: np.ndarray, y: np.ndarray) -> List[ComparisonRow]:
    difference = x - y
    scale = float(np.max(np.abs(x)))
    return [
        ComparisonRow(
            quantity=f'{name}_max_abs_difference',
            parametrix_x=scale,
            parametrix_y=float(np.max(np.abs(y))),
            difference=float(np.max(np.abs(difference))),
        ),
        ComparisonRow(
            quantity=f'{name}_frobenius_difference',
            parametrix_x=float(np.linalg.norm(x)),
            parametrix_y=float(np.linalg.norm(y)),
            difference=float(np.linalg.norm(difference)),
        ),
        ComparisonRow(
            quantity=f'{name}_mean_abs_self_term',
            parametrix_x=float(np.mean(np.abs(np.diagonal(x)))),
            parametrix_y=float(np.mean(np.abs(np.diagonal(y)))),
            difference=float(np.max(np.abs(np.diagonal(difference)))),
        ),
    ]


def _infinity_norm(values: np.ndarray) -> float:
    return float(np.max(np.sum(np.abs(values), axis=1))) if values.size else 0.0


def compare_parametrices(
    field: CoefficientField,
    geometry: DomainGeometry,
    refinement: int,
    policy: Optional[SingularPolicy] = None,
) -> ComparisonReport:
    """
    Single layer, volume potential and remainder matrices assembled with P(x, y) = P_lap / a(x)
    and with P_lap / a(y), side by side. Descriptive only: no system is solved with the second.
    """
    require_positive(field, geometry.bounding_box())
    policy = policy or SingularPolicy()
    surface, volume = build_meshes(geometry, refinement)
    barycenters = TargetSet.barycenters(volume)
    if field.is_constant:
        logging.info(f'Constant coefficient {field.describe()}: both parametrices coincide')

    rows: List[ComparisonRow] = []
    single = {
        kind: assemble_calV(surface, field, policy, parametrix=kind).values
        for kind in (ParametrixKind.X, ParametrixKind.Y)
    }
    rows.extend(_matrix_rows('calV', single[ParametrixKind.X], single[ParametrixKind.Y]))
    newton = {
        kind: assemble_P(volume, barycenters, field, policy, parametrix=kind).values
        for kind in (ParametrixKind.X, ParametrixKind.Y)
    }
    rows.extend(_matrix_rows('P', newton[ParametrixKind.X], newton[ParametrixKind.Y]))
    remainder = {
        kind: assemble_R(volume, barycenters, field, policy, parametrix=kind).values
        for kind in (ParametrixKind.X, ParametrixKind.Y)
    }
    norm_x = _infinity_norm(remainder[ParametrixKind.X])
    norm_y = _infinity_norm(remainder[ParametrixKind.Y])
    rows.append(ComparisonRow(
        quantity='R_infinity_norm',
        parametrix_x=norm_x,
        parametrix_y=norm_y,
        difference=abs(norm_x - norm_y),
    ))
    identical = all(row.difference == 0.0 for row in rows)
    logging.info(f'Parametrix comparison: |R^x|={norm_x:.4g}, |R^y|={norm_y:.4g}, identical={identical}')
    return ComparisonReport(
        geometry=f'{geometry.kind.value}({geometry.size!r})',
        coefficient=field.describe(),
        refinement=refinement,
        identical=identical,
        remainder_ratio=norm_x / norm_y if norm_y > 0.0 else None,
        rows=rows,
    )
