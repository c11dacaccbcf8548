import numpy as np
import pytest

from app.engine.coefficient.schemas import CoefficientFamily, CoefficientField
from app.engine.mesh.builders import build_ball_mesh
from app.engine.mesh.schemas import DomainGeometry, GeometryKind
from app.engine.potentials.operations import apply, dump_matrix, load_matrix
from app.engine.potentials.schemas import AssemblyPath, DomainDensity, OperatorId, TargetSet
from app.engine.potentials.surface import assemble_calV, assemble_calW, assemble_W, trace_double_layer
from app.engine.potentials.volume import assemble_P, assemble_R
from app.engine.quadrature.schemas import SingularPolicy
from app.engine.verification.probes import interior_probes, spread_subset
from app.exceptions.assembly_error import AssemblyError

UNIT = CoefficientField.constant(1.0)


@pytest.fixture(scope='module')
def policy():
    return SingularPolicy()


@pytest.fixture(scope='module')
def ball_r1():
    return build_ball_mesh(1.0, 1)


@pytest.fixture(scope='module')
def ball_r2():
    return build_ball_mesh(1.0, 2)


@pytest.fixture(scope='module')
def field():
    return CoefficientField(family=CoefficientFamily.QUADRATIC, params=(1.0, 1.0))


@pytest.fixture(scope='module')
def cell_targets(ball_r1):
    _, volume = ball_r1
    return TargetSet.barycenters(volume, spread_subset(np.arange(volume.n_cells), 64))


def test_newton_potential_of_one_at_the_center(ball_r2, policy):
    # Arrange: integral of -1/(4 pi |y|) over the unit ball is -1/2
    _, volume = ball_r2
    origin = TargetSet.from_points([[0.0, 0.0, 0.0]], label='origin')

    # Act
    matrix = assemble_P(volume, origin, UNIT, policy)

    # Assert
    assert matrix.operator == OperatorId.P
    assert apply(matrix, DomainDensity.constant(volume))[0] == pytest.approx(-0.5, abs=2.5e-2)


def test_volume_potential_scales_with_constant_coefficient(ball_r1, cell_targets, policy):
    _, volume = ball_r1

    unit = assemble_P(volume, cell_targets, UNIT, policy).values
    doubled = assemble_P(volume, cell_targets, CoefficientField.constant(2.0), policy).values

    assert np.allclose(doubled, 0.5 * unit, rtol=1e-14, atol=0.0)


def test_remainder_vanishes_for_constant_coefficient(ball_r1, cell_targets, policy):
    _, volume = ball_r1

    remainder = assemble_R(volume, cell_targets, CoefficientField.constant(3.0), policy)

    assert remainder.values.shape == (cell_targets.size, volume.n_cells)
    assert not np.any(remainder.values)


@pytest.mark.parametrize('name', ['P', 'R'])
def test_volume_assembly_paths_agree(name, ball_r1, cell_targets, policy, field):
    # Arrange
    _, volume = ball_r1
    assemble = assemble_P if name == 'P' else assemble_R

    # Act
    direct = assemble(volume, cell_targets, field, policy, AssemblyPath.DIRECT).values
    relation = assemble(volume, cell_targets, field, policy, AssemblyPath.RELATION).values

    # Assert
    assert np.max(np.abs(relation - direct)) <= 1e-12 * np.max(np.abs(direct))


def test_surface_assembly_paths_agree(ball_r1, policy, field):
    surface, _ = ball_r1

    for assemble in (assemble_calV, assemble_calW):
        direct = assemble(surface, field, policy, AssemblyPath.DIRECT).values
        relation = assemble(surface, field, policy, AssemblyPath.RELATION).values
        assert np.max(np.abs(relation - direct)) <= 1e-12 * np.max(np.abs(direct))


def test_double_layer_of_one_inside(ball_r1, policy):
    # Arrange
    surface, _ = ball_r1
    geometry = DomainGeometry(kind=GeometryKind.BALL, size=1.0)
    probes = TargetSet.from_points(interior_probes(geometry, 10), label='probes')
    ones = np.ones(surface.n_panels)

    # Act
    interior = assemble_W(surface, probes, UNIT, policy).values @ ones
    trace = trace_double_layer(assemble_calW(surface, UNIT, policy)) @ ones

    # Assert
    assert np.allclose(interior, -1.0, atol=2e-2)
    assert np.allclose(trace, -1.0, atol=2e-2)


def test_double_layer_refuses_centroids(ball_r1, policy):
    surface, _ = ball_r1

    with pytest.raises(AssemblyError):
        assemble_W(surface, TargetSet.centroids(surface), UNIT, policy)


def test_single_layer_is_positive_for_constant_coefficient(ball_r1, policy):
    surface, _ = ball_r1

    single = assemble_calV(surface, UNIT, policy).values

    assert np.all(single > 0.0)
    assert np.all(np.argmax(single, axis=1) == np.arange(surface.n_panels))


def test_matrix_dump_round_trip(ball_r1, policy, tmp_path):
    surface, _ = ball_r1
    matrix = assemble_calV(surface, UNIT, policy)
    path = tmp_path / 'calV.bin'

    dump_matrix(matrix, path)

    assert np.array_equal(load_matrix(path), matrix.values)
