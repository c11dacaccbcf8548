import logging
from typing import List, Tuple

import numpy as np

from app.engine.bdie.schemas import BdieSystem, DirichletProblem, RightHandSideKind
from app.engine.kernels.evaluate import parametrix_x
from app.engine.potentials.assembly import singularity_radius
from app.engine.potentials.operations import apply
from app.engine.potentials.schemas import TargetSet
from app.engine.potentials.surface import assemble_calV, assemble_calW, assemble_V, assemble_W, trace_double_layer
from app.engine.potentials.volume import assemble_P, assemble_R


def point_source_potential(problem: DirichletProblem, points: np.ndarray) -> Tuple[np.ndarray, List[str]]:
    """P delta_{x0}(y) = P(x0, y) summed over the sources, with near-field warnings."""
    points = np.atleast_2d(points)
    eps = singularity_radius(problem.volume.nodes)
    h = problem.h
    values = np.zeros(points.shape[0])
    warnings: List[str] = []
    for source in problem.rhs.sources:
        location = np.asarray(source.location, dtype=float)
        separation = np.linalg.norm(points - location, axis=1)
        close = np.flatnonzero(separation < h)
        if close.size:
            message = f'{close.size} targets within h={h:.3g} of the point source at {source.location}'
            logging.warning(message)
            warnings.append(message)
        values += source.strength * parametrix_x(location[None, :], points, problem.field, eps)
    return values, warnings


def _volume_potential(problem: DirichletProblem, targets: TargetSet) -> Tuple[np.ndarray, List[str]]:
    rhs = problem.rhs
    if rhs.kind == RightHandSideKind.POINT_SOURCES:
        return point_source_potential(problem, targets.points)
    if rhs.is_zero:
        return np.zeros(targets.size), []
    matrix = assemble_P(problem.volume, targets, problem.field, problem.policy)
    return apply(matrix, rhs.density), []


def _double_layer(problem: DirichletProblem, targets: TargetSet) -> np.ndarray:
    phi = problem.dirichlet.values
    if not np.any(phi):
        return np.zeros(targets.size)
    if np.all(targets.panel_of >= 0):
        calW = assemble_calW(problem.surface, problem.field, problem.policy)
        return (trace_double_layer(calW) @ phi)[targets.panel_of]
    return apply(assemble_W(problem.surface, targets, problem.field, problem.policy), phi)


def assemble_F0_with_warnings(problem: DirichletProblem, targets: TargetSet) -> Tuple[np.ndarray, List[str]]:
    potential, warnings = _volume_potential(problem, targets)
    return potential - _double_layer(problem, targets), warnings


def assemble_F0(problem: DirichletProblem, targets: TargetSet) -> np.ndarray:
    """F0 = P f - W phi0 at barycenters or other interior targets; centroid targets get the trace."""
    values, _ = assemble_F0_with_warnings(problem, targets)
    return values


def assemble_trace_F0_with_warnings(problem: DirichletProblem) -> Tuple[np.ndarray, List[str]]:
    return assemble_F0_with_warnings(problem, TargetSet.centroids(problem.surface))


def assemble_trace_F0(problem: DirichletProblem) -> np.ndarray:
    """gamma F0 = gamma P f - (calW phi0 - phi0 / 2) at the centroids."""
    values, _ = assemble_trace_F0_with_warnings(problem)
    return values


def assemble_system(problem: DirichletProblem) -> BdieSystem:
    surface, volume = problem.surface, problem.volume
    field, policy = problem.field, problem.policy
    barycenters = TargetSet.barycenters(volume)
    centroids = TargetSet.centroids(surface)
    logging.info(f'Assembling BDIE system with {volume.n_cells} cells and {surface.n_panels} panels')

    cells = volume.n_cells
    matrix = np.empty((cells + surface.n_panels, cells + surface.n_panels), order='F')
    matrix[:cells, :cells] = assemble_R(volume, barycenters, field, policy).values
    matrix[:cells, :cells][np.diag_indices(cells)] += 1.0
    np.negative(assemble_V(surface, barycenters, field, policy).values, out=matrix[:cells, cells:])
    matrix[cells:, :cells] = assemble_R(volume, centroids, field, policy).values
    np.negative(assemble_calV(surface, field, policy).values, out=matrix[cells:, cells:])
    forcing, warnings = assemble_F0_with_warnings(problem, barycenters)
    trace_forcing, trace_warnings = assemble_trace_F0_with_warnings(problem)
    rhs = np.concatenate([forcing, trace_forcing - problem.dirichlet.values])
    logging.info(f'BDIE system ready: {matrix.shape[0]} unknowns')
    return BdieSystem(
        matrix=matrix,
        rhs=rhs,
        n_cells=volume.n_cells,
        n_panels=surface.n_panels,
        warnings=tuple(warnings + trace_warnings),
    )
