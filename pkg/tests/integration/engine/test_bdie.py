import json
import math

import numpy as np
import pytest

from app.engine.bdie.assembly import assemble_F0, assemble_system, assemble_trace_F0
from app.engine.bdie.problem import build_problem
from app.engine.bdie.representation import evaluate_representation
from app.engine.bdie.schemas import BdieSystem, PointSource, RightHandSide, SolveMethod
from app.engine.bdie.solution_io import write_diagnostics, write_solution
from app.engine.bdie.solve import solve
from app.engine.coefficient.schemas import CoefficientFamily, CoefficientField
from app.engine.mesh.schemas import DomainGeometry, GeometryKind
from app.engine.potentials.schemas import TargetSet
from app.engine.verification.cases import get_case
from app.exceptions.assembly_error import AssemblyError
from app.exceptions.coefficient_error import CoefficientError
from app.runtime.csv_report import read_report

BALL = DomainGeometry(kind=GeometryKind.BALL, size=1.0)
UNIT = CoefficientField.constant(1.0)


def constant_trace(value):
    return lambda points: np.full(np.shape(points)[:-1], value)


@pytest.fixture(scope='module')
def constant_problem():
    return build_problem(BALL, 1, UNIT, constant_trace(1.0))


@pytest.fixture(scope='module')
def constant_solution(constant_problem):
    return solve(assemble_system(constant_problem))


def test_system_layout(constant_problem):
    # Act
    system = assemble_system(constant_problem)

    # Assert
    assert system.n_cells == 320
    assert system.n_panels == 80
    assert system.matrix.shape == (400, 400)
    assert np.array_equal(system.block(0, 0), np.eye(320))


def test_forcing_for_constant_trace(constant_problem):
    # Act: with a = 1 and f = 0, F0 = -W[1] = 1 inside and on the boundary
    forcing = assemble_F0(constant_problem, TargetSet.barycenters(constant_problem.volume))
    trace_forcing = assemble_trace_F0(constant_problem)

    # Assert
    assert forcing.shape == (320,)
    assert np.allclose(forcing, 1.0, atol=2e-2)
    assert trace_forcing.shape == (80,)
    assert np.allclose(trace_forcing, 1.0, atol=2e-2)


def test_constant_solution(constant_solution):
    # Assert: u = 1 in the domain, zero conormal derivative on the boundary
    assert np.allclose(constant_solution.u.values, 1.0, atol=1e-2)
    assert np.allclose(constant_solution.psi.values, 0.0, atol=2e-2)
    assert constant_solution.diagnostics.method == SolveMethod.DIRECT_LU
    assert constant_solution.diagnostics.residual_norm <= 1e-10
    assert constant_solution.diagnostics.condition_estimate > 1.0


def test_representation_inside(constant_problem, constant_solution):
    points = [[0.0, 0.0, 0.0], [0.3, -0.2, 0.1]]

    values = evaluate_representation(constant_solution, constant_problem, points)

    assert np.allclose(values, 1.0, atol=2e-2)


def test_representation_refuses_outside_points(constant_problem, constant_solution):
    with pytest.raises(AssemblyError):
        evaluate_representation(constant_solution, constant_problem, [[1.5, 0.0, 0.0]])


def test_zero_data_gives_zero_solution():
    # Arrange
    field = CoefficientField(family=CoefficientFamily.QUADRATIC, params=(1.0, 1.0))
    problem = build_problem(BALL, 0, field, constant_trace(0.0))

    # Act
    solution = solve(assemble_system(problem))

    # Assert
    assert not np.any(solution.vector)
    assert solution.diagnostics.iterations == 0


@pytest.fixture(scope='module')
def case_system():
    case = get_case('C2')
    return assemble_system(build_problem(BALL, 1, case.field, case.u, rhs=case.f))


def relative_difference(left, right):
    return np.linalg.norm(left - right) / np.linalg.norm(right)


def test_direct_and_iterative_solutions_agree(case_system):
    # Act
    direct = solve(case_system, SolveMethod.DIRECT_LU)
    iterative = solve(case_system, SolveMethod.ITERATIVE)

    # Assert
    assert relative_difference(iterative.vector, direct.vector) <= 1e-8
    assert iterative.diagnostics.iterations > 0
    assert iterative.diagnostics.condition_estimate is None


def test_iterative_solution_does_not_depend_on_initial_guess(case_system):
    # Arrange
    guess = np.random.default_rng(3).normal(size=case_system.size)

    # Act
    from_zero = solve(case_system, SolveMethod.ITERATIVE)
    from_guess = solve(case_system, SolveMethod.ITERATIVE, x0=guess)

    # Assert
    assert relative_difference(from_guess.vector, from_zero.vector) <= 1e-8


def test_overwriting_solve_matches_plain_solve(case_system):
    # Arrange
    copy = BdieSystem(
        matrix=np.array(case_system.matrix, order='F'),
        rhs=case_system.rhs,
        n_cells=case_system.n_cells,
        n_panels=case_system.n_panels,
    )

    # Act
    plain = solve(case_system)
    overwritten = solve(copy, overwrite=True)

    # Assert
    assert np.allclose(overwritten.vector, plain.vector, rtol=1e-12, atol=1e-14)
    assert overwritten.diagnostics.residual_norm <= 1e-10
    assert overwritten.diagnostics.condition_estimate == pytest.approx(plain.diagnostics.condition_estimate)
    assert not np.array_equal(copy.matrix, case_system.matrix)


def test_point_source_matches_green_function():
    # Arrange: Green's function of the unit ball with pole at the center, -1/(4 pi r) + 1/(4 pi)
    rhs = RightHandSide.point_sources([PointSource(location=(0.0, 0.0, 0.0))])
    problem = build_problem(BALL, 2, UNIT, constant_trace(0.0), rhs=rhs)

    rng = np.random.default_rng(7)
    directions = rng.normal(size=(20, 3))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    radii = rng.uniform(0.3, 0.8, size=20)
    probes = directions * radii[:, None]
    exact = -1.0 / (4.0 * math.pi * radii) + 1.0 / (4.0 * math.pi)

    # Act
    solution = solve(assemble_system(problem))
    values = evaluate_representation(solution, problem, probes)

    # Assert
    assert np.max(np.abs(values - exact) / np.abs(exact)) <= 5e-2


def test_shallow_point_source_is_rejected():
    rhs = RightHandSide.point_sources([PointSource(location=(0.95, 0.0, 0.0))])

    with pytest.raises(AssemblyError):
        build_problem(BALL, 1, UNIT, constant_trace(0.0), rhs=rhs)


def test_non_positive_coefficient_is_rejected():
    field = CoefficientField(family=CoefficientFamily.LINEAR, params=(0.5, 1.0, 0.0, 0.0))

    with pytest.raises(CoefficientError):
        build_problem(BALL, 0, field, constant_trace(0.0))


def test_solution_files(constant_problem, constant_solution, tmp_path):
    # Act
    solution_path = write_solution(constant_solution, constant_problem, tmp_path)
    diagnostics_path = write_diagnostics(constant_solution, tmp_path)

    # Assert
    comments, (cells, panels) = read_report(solution_path)
    assert '# refinement: 1' in comments
    assert cells[0] == ['cell_id', 'x', 'y', 'z', 'u']
    assert len(cells) == 321
    assert panels[0] == ['panel_id', 'x', 'y', 'z', 'psi']
    assert len(panels) == 81
    assert float(cells[1][4]) == pytest.approx(1.0, abs=2e-2)
    diagnostics = json.loads(diagnostics_path.read_text())
    assert diagnostics['method'] == 'direct_lu'
    assert diagnostics['iterations'] is None
