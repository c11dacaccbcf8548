import logging
from typing import Callable, Iterable, List, Optional

from pydantic import BaseModel

from app.engine.bdie.assembly import assemble_system
from app.engine.bdie.schemas import DirichletProblem
from app.engine.bdie.solve import estimate_condition, solve
from app.exceptions.solver_error import SolverError


class ConditionRow(BaseModel):
    refinement: int
    h: float
    n_unknowns: int
    cond_estimate: Optional[float]
    residual: Optional[float]
    singular: bool = False

    class Config:
        allow_mutation = False


def condition_report(problem_at: Callable[[int], DirichletProblem], refinements: Iterable[int]) -> List[ConditionRow]:
    """1-norm condition estimates of the BDIE matrix per refinement; a failing LU is a row, not an exception."""
    rows: List[ConditionRow] = []
    for refinement in refinements:
        problem = problem_at(refinement)
        system = assemble_system(problem)
        try:
            condition = estimate_condition(system.matrix)
            residual = solve(system).diagnostics.residual_norm
            rows.append(ConditionRow(
                refinement=refinement,
                h=problem.h,
                n_unknowns=system.size,
                cond_estimate=condition,
                residual=residual,
            ))
        except SolverError as e:
            logging.error(f'Refinement {refinement}: {e.message}')
            rows.append(ConditionRow(
                refinement=refinement,
                h=problem.h,
                n_unknowns=system.size,
                cond_estimate=e.condition_estimate,
                residual=None,
                singular=True,
            ))
        logging.info(f'Refinement {refinement}: condition estimate {rows[-1].cond_estimate}')
    return rows
