import logging
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel

from app.engine.coefficient.schemas import BoundingBox, CoefficientField
from app.exceptions.coefficient_error import CoefficientError

RELATIVE_SLACK = 1e-12


class PositivityReport(BaseModel):
    ok: bool
    min_found: float
    max_found: float
    offending_point: Optional[Tuple[float, float, float]] = None

    class Config:
        allow_mutation = False


def check_positivity(field: CoefficientField, box: BoundingBox, n_samples: int) -> PositivityReport:
    """
    Sample a on a regular n_samples^3 lattice over the box and compare against the declared bounds.
    """
    if n_samples < 1:
        raise CoefficientError('n_samples must be at least 1')
    axes = [
        np.linspace(lo, hi, n_samples) if n_samples > 1 else np.array([0.5 * (lo + hi)])
        for lo, hi in zip(box.lower, box.upper)
    ]
    lattice = np.stack(np.meshgrid(*axes, indexing='ij'), axis=-1).reshape(-1, 3)
    values = field.eval(lattice)

    i_min = int(np.argmin(values))
    i_max = int(np.argmax(values))
    min_found = float(values[i_min])
    max_found = float(values[i_max])

    ok = min_found >= field.a_min * (1.0 - RELATIVE_SLACK)
    offending = tuple(lattice[i_min]) if not ok else None
    if ok and field.a_max is not None and max_found > field.a_max * (1.0 + RELATIVE_SLACK):
        ok = False
        offending = tuple(lattice[i_max])

    if not ok:
        logging.warning(f'Coefficient {field.describe()} violates bounds on box: min={min_found}, max={max_found}')
    return PositivityReport(ok=ok, min_found=min_found, max_found=max_found, offending_point=offending)


def require_positive(field: CoefficientField, box: BoundingBox, n_samples: int = 21) -> PositivityReport:
    report = check_positivity(field, box, n_samples)
    if not report.ok:
        raise CoefficientError(
            f'positivity check failed: coefficient {field.describe()} is not bounded in '
            f'[{field.a_min}, {field.a_max or "inf"}] '
            f'on the domain: found {report.min_found} .. {report.max_found} at {report.offending_point}',
        )
    return report
