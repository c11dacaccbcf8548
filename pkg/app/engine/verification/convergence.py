import logging
import math
import time
from typing import Dict, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel

from app.engine.bdie.assembly import assemble_system
from app.engine.bdie.problem import build_problem
from app.engine.bdie.schemas import DirichletProblem, SolveMethod
from app.engine.bdie.solve import DEFAULT_TOLERANCE, solve
from app.engine.mesh.schemas import DomainGeometry
from app.engine.potentials.operations import apply
from app.engine.potentials.schemas import TargetSet
from app.engine.potentials.surface import assemble_V, assemble_W
from app.engine.potentials.volume import assemble_P, assemble_R
from app.engine.quadrature.schemas import SingularPolicy
from app.engine.verification.cases import ManufacturedCase, check_case
from app.engine.verification.probes import deep_cells
from app.exceptions.bdie_error import BdieError
from app.exceptions.config_error import ConfigError

ORDER_METRICS = ('err_u_L2', 'err_u_max', 'err_psi_L2', 'green_residual')


class ConvergenceRow(BaseModel):
    refinement: int
    h: float
    n_unknowns: int
    err_u_L2: Optional[float] = None
    err_u_max: Optional[float] = None
    err_psi_L2: Optional[float] = None
    green_residual: Optional[float] = None
    cond_estimate: Optional[float] = None
    runtime: float = 0.0
    solved: bool = True
    message: str = ''

    class Config:
        allow_mutation = False


class ConvergenceReport(BaseModel):
    case: str
    geometry: str
    rows: List[ConvergenceRow]
    orders: Dict[str, List[Optional[float]]]
    exact: bool = False

    class Config:
        allow_mutation = False

    @property
    def all_solved(self) -> bool:
        return all(row.solved for row in self.rows)


def estimate_orders(h: Sequence[float], errors: Sequence[Optional[float]]) -> List[Optional[float]]:
    """log(e_{k-1} / e_k) / log(h_{k-1} / h_k) for consecutive levels; None where undefined."""
    orders: List[Optional[float]] = [None]
    for k in range(1, len(errors)):
        coarse, fine = errors[k - 1], errors[k]
        if coarse is None or fine is None or coarse <= 0.0 or fine <= 0.0 or h[k - 1] == h[k]:
            orders.append(None)
            continue
        orders.append(math.log(coarse / fine) / math.log(h[k - 1] / h[k]))
    return orders


def green_residual(problem: DirichletProblem, case: ManufacturedCase) -> float:
    """
    sup |u + R u - V psi + W phi0 - P f| over barycenters at least h inside, with exact u and psi.
    """
    cells = deep_cells(problem.geometry, problem.volume, problem.h)
    targets = TargetSet.barycenters(problem.volume, cells)
    u = case.u_cells(problem.volume)
    psi = case.conormal(problem.surface)
    field, policy = problem.field, problem.policy

    residual = u.values[cells] + apply(assemble_R(problem.volume, targets, field, policy), u)
    residual -= apply(assemble_V(problem.surface, targets, field, policy), psi)
    if np.any(problem.dirichlet.values):
        residual += apply(assemble_W(problem.surface, targets, field, policy), problem.dirichlet)
    if not problem.rhs.is_zero:
        residual -= apply(assemble_P(problem.volume, targets, field, policy), problem.rhs.density)
    return float(np.max(np.abs(residual)))


def case_problem(
    case: ManufacturedCase,
    geometry: DomainGeometry,
    refinement: int,
    policy: Optional[SingularPolicy] = None,
) -> DirichletProblem:
    return build_problem(geometry, refinement, case.field, case.u, rhs=case.f, policy=policy)


def green_identity_residual(
    case: ManufacturedCase,
    geometry: DomainGeometry,
    refinement: int,
    policy: Optional[SingularPolicy] = None,
) -> float:
    return green_residual(case_problem(case, geometry, refinement, policy), case)


def _errors(problem: DirichletProblem, case: ManufacturedCase, u: np.ndarray, psi: np.ndarray) -> dict:
    u_error = u - case.u_cells(problem.volume).values
    psi_error = psi - case.conormal(problem.surface).values
    return {
        'err_u_L2': float(np.sqrt(np.sum(problem.volume.volumes * u_error ** 2))),
        'err_u_max': float(np.max(np.abs(u_error))),
        'err_psi_L2': float(np.sqrt(np.sum(problem.surface.areas * psi_error ** 2))),
    }


def run_convergence(
    case: ManufacturedCase,
    geometry: DomainGeometry,
    refinements: Sequence[int],
    policy: Optional[SingularPolicy] = None,
    method: SolveMethod = SolveMethod.DIRECT_LU,
    tol: float = DEFAULT_TOLERANCE,
) -> ConvergenceReport:
    """
    Solve the case on each refinement and measure errors against the exact solution.

    A level whose assembly or solve fails is kept as an unsolved row with its message.
    """
    if not refinements:
        raise ConfigError('convergence study needs at least one refinement level')
    if list(refinements) != sorted(set(refinements)):
        raise ConfigError(f'refinement levels must be strictly increasing, got {list(refinements)}')
    check_case(case)
    logging.info(f'Convergence study {case.name} on {geometry.kind.value}, levels {list(refinements)}')

    rows: List[ConvergenceRow] = []
    for refinement in refinements:
        started = time.perf_counter()
        problem = case_problem(case, geometry, refinement, policy)
        try:
            solution = solve(assemble_system(problem), method=method, tol=tol, overwrite=True)
            values = _errors(problem, case, solution.u.values, solution.psi.values)
            values['green_residual'] = green_residual(problem, case)
            row = ConvergenceRow(
                refinement=refinement,
                h=problem.h,
                n_unknowns=problem.n_unknowns,
                cond_estimate=solution.diagnostics.condition_estimate,
                runtime=time.perf_counter() - started,
                **values,
            )
        except BdieError as e:
            logging.error(f'Level {refinement} failed: {e.message}')
            row = ConvergenceRow(
                refinement=refinement,
                h=problem.h,
                n_unknowns=problem.n_unknowns,
                runtime=time.perf_counter() - started,
                solved=False,
                message=e.message,
            )
        logging.info(
            f'Level {refinement}: h={row.h:.4g} err_u_L2={row.err_u_L2} err_psi_L2={row.err_psi_L2} '
            f'green={row.green_residual} ({row.runtime:.1f}s)',
        )
        rows.append(row)

    h = [row.h for row in rows]
    orders = {metric: estimate_orders(h, [getattr(row, metric) for row in rows]) for metric in ORDER_METRICS}
    return ConvergenceReport(
        case=case.name,
        geometry=f'{geometry.kind.value}({geometry.size!r})',
        rows=rows,
        orders=orders,
        exact=case.exact,
    )
