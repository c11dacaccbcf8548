import logging
from typing import Callable, Optional

import numpy as np

from app.engine.bdie.schemas import DirichletProblem, RightHandSide, RightHandSideKind
from app.engine.coefficient.positivity import require_positive
from app.engine.coefficient.schemas import CoefficientField
from app.engine.mesh.builders import build_meshes
from app.engine.mesh.schemas import DomainGeometry, SurfaceMesh, VolumeMesh
from app.engine.potentials.schemas import BoundaryDensity
from app.engine.quadrature.schemas import SingularPolicy
from app.exceptions.assembly_error import AssemblyError


def check_link(surface: SurfaceMesh, volume: VolumeMesh) -> None:
    link = volume.link
    if link.shape[0] != surface.n_panels or not np.array_equal(np.sort(link[:, 2]), np.arange(surface.n_panels)):
        raise AssemblyError(
            f'boundary link is not a bijection: {link.shape[0]} links for {surface.n_panels} panels',
        )


def validate_problem(problem: DirichletProblem) -> DirichletProblem:
    require_positive(problem.field, problem.geometry.bounding_box())
    check_link(problem.surface, problem.volume)
    if problem.dirichlet.values.shape != (problem.surface.n_panels,):
        raise AssemblyError(
            f'Dirichlet data has {problem.dirichlet.values.size} values for {problem.surface.n_panels} panels',
        )
    rhs = problem.rhs
    if rhs.kind == RightHandSideKind.DENSITY:
        if rhs.density is None or rhs.density.values.shape != (problem.volume.n_cells,):
            raise AssemblyError('density right-hand side does not match the cell count')
    else:
        h = problem.h
        for source in rhs.sources:
            depth = float(problem.geometry.distance_to_boundary(np.asarray(source.location)))
            if depth <= h:
                raise AssemblyError(
                    f'point source at {source.location} is {depth:.3g} from the boundary; '
                    f'it must be deeper than h={h:.3g}',
                )
    return problem


def build_problem(
    geometry: DomainGeometry,
    refinement: int,
    field: CoefficientField,
    trace: Callable[[np.ndarray], np.ndarray],
    rhs: Optional[Callable] = None,
    policy: Optional[SingularPolicy] = None,
) -> DirichletProblem:
    """
    Mesh the domain and sample the data.

    rhs is either None (f = 0), a function of the barycenters, or a ready RightHandSide;
    the latter is how point sources come in.
    """
    surface, volume = build_meshes(geometry, refinement)
    if rhs is None:
        right = RightHandSide.zero(volume)
    elif isinstance(rhs, RightHandSide):
        right = rhs
    else:
        right = RightHandSide.from_function(volume, rhs)
    problem = DirichletProblem(
        geometry=geometry,
        field=field,
        rhs=right,
        dirichlet=BoundaryDensity.sample(surface, trace),
        surface=surface,
        volume=volume,
        policy=policy or SingularPolicy(),
        refinement=refinement,
    )
    logging.info(
        f'Problem on {geometry.kind.value} refinement {refinement}: a={field.describe()}, rhs={right.kind.value}, '
        f'{problem.n_unknowns} unknowns',
    )
    return validate_problem(problem)
