import logging

import numpy as np

from app.engine.bdie.assembly import assemble_F0_with_warnings
from app.engine.bdie.schemas import DirichletProblem, Solution
from app.engine.potentials.operations import apply
from app.engine.potentials.schemas import TargetSet
from app.engine.potentials.surface import assemble_V
from app.engine.potentials.volume import assemble_R
from app.exceptions.assembly_error import AssemblyError


def evaluate_representation(solution: Solution, problem: DirichletProblem, points) -> np.ndarray:
    """u(y) = P f(y) - R u(y) + V psi(y) - W phi0(y) at interior points."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    depth = problem.geometry.distance_to_boundary(points)
    outside = np.flatnonzero(depth <= 0.0)
    if outside.size:
        raise AssemblyError(f'point {points[outside[0]].tolist()} is not inside the domain')
    shallow = int(np.count_nonzero(depth <= 0.5 * problem.h))
    if shallow:
        logging.warning(f'{shallow} representation points lie within h/2 of the boundary')

    targets = TargetSet.from_points(points, label='probes')
    forcing, _ = assemble_F0_with_warnings(problem, targets)
    remainder = assemble_R(problem.volume, targets, problem.field, problem.policy)
    single = assemble_V(problem.surface, targets, problem.field, problem.policy)
    return forcing - apply(remainder, solution.u) + apply(single, solution.psi)
